#include "cropdiv/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "cropdiv/errors.hpp"

namespace cropdiv {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(counter_draw(seed, stream, counter) >> 11) * 0x1.0p-53;
}

namespace {

// Streams keep independent draw purposes from colliding on the same counter.
constexpr std::uint64_t kStreamStripHeight = 0;
constexpr std::uint64_t kStreamPatchWidth = 1;
constexpr std::uint64_t kStreamPatchClass = 2;
constexpr std::uint64_t kStreamCropland = 3;
constexpr std::uint64_t kStreamShift = 4;
constexpr std::uint64_t kStreamPixelClass = 5;

std::vector<ClassCode> resolve_codes(const SyntheticSpec& spec) {
    std::vector<ClassCode> codes = spec.codes;
    if (codes.empty()) {
        const ClassScheme scheme = ClassScheme::eu_cropmap_2018();
        if (spec.n_classes < 1 || spec.n_classes > scheme.size()) {
            throw ComputeError("synthetic class count must lie in [1, " +
                               std::to_string(scheme.size()) + "] unless codes are given");
        }
        for (int j = 0; j < spec.n_classes; ++j) {
            codes.push_back(scheme.code(j));
        }
    }
    for (const ClassCode code : codes) {
        if (code == spec.nodata || code == spec.non_cropland_code) {
            throw ComputeError("synthetic class codes collide with nodata or non-cropland code");
        }
    }
    return codes;
}

// Cumulative weights normalized to [0, 1) for inverse-CDF class draws.
std::vector<double> cumulative_weights(const SyntheticSpec& spec, std::size_t n_codes) {
    std::vector<double> weights = spec.class_weights;
    if (weights.empty()) {
        weights.assign(n_codes, 1.0);
    }
    if (weights.size() != n_codes) {
        throw ComputeError("class weight count does not match class count");
    }
    double total = 0.0;
    for (const double w : weights) {
        if (w < 0.0) throw ComputeError("class weights must be non-negative");
        total += w;
    }
    if (!(total > 0.0)) {
        throw ComputeError("class weights sum to zero");
    }
    std::vector<double> cum(n_codes);
    double acc = 0.0;
    for (std::size_t j = 0; j < n_codes; ++j) {
        acc += weights[j] / total;
        cum[j] = acc;
    }
    cum.back() = 1.0;
    return cum;
}

std::size_t pick_class(const std::vector<double>& cum, double u) {
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    return std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
}

CategoricalRaster blank_raster(const SyntheticSpec& spec) {
    if (spec.cell_rows < 1 || spec.cell_cols < 1 || spec.base_factor < 1) {
        throw ComputeError("synthetic lattice shape and base_factor must be positive");
    }
    CategoricalRaster raster;
    raster.height = spec.cell_rows * spec.base_factor;
    raster.width = spec.cell_cols * spec.base_factor;
    raster.cell_size = spec.cell_size;
    raster.origin_x = spec.origin_x;
    raster.origin_y = spec.origin_y;
    raster.nodata = spec.nodata;
    raster.values.resize(raster.height, raster.width);
    return raster;
}

CategoricalRaster generate_checkerboard(const SyntheticSpec& spec) {
    const std::vector<ClassCode> codes = resolve_codes(spec);
    const auto S = static_cast<Eigen::Index>(codes.size());
    CategoricalRaster raster = blank_raster(spec);

    const auto p = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(S))));
    const bool square = p * p == S;
    const Eigen::Index f = spec.base_factor;
    for (Eigen::Index r = 0; r < raster.height; ++r) {
        const Eigen::Index cell_row = r / f;
        ClassCode* row = raster.values.data() + r * raster.width;
        for (Eigen::Index c = 0; c < raster.width; ++c) {
            const Eigen::Index cell_col = c / f;
            const Eigen::Index j = square ? (cell_row % p) * p + (cell_col % p)
                                          : (cell_row + cell_col) % S;
            row[c] = codes[static_cast<std::size_t>(j)];
        }
    }
    return raster;
}

CategoricalRaster generate_uniform_random(const SyntheticSpec& spec) {
    const std::vector<ClassCode> codes = resolve_codes(spec);
    const std::vector<double> cum = cumulative_weights(spec, codes.size());
    CategoricalRaster raster = blank_raster(spec);

    const bool thin = spec.cropland_fraction < 1.0;
    for (Eigen::Index r = 0; r < raster.height; ++r) {
        ClassCode* row = raster.values.data() + r * raster.width;
        for (Eigen::Index c = 0; c < raster.width; ++c) {
            const auto counter = static_cast<std::uint64_t>(r * raster.width + c);
            if (thin &&
                counter_uniform(spec.seed, kStreamCropland, counter) >= spec.cropland_fraction) {
                row[c] = spec.non_cropland_code;
                continue;
            }
            const double u = counter_uniform(spec.seed, kStreamPixelClass, counter);
            row[c] = codes[pick_class(cum, u)];
        }
    }
    return raster;
}

// Patchwork: horizontal strips of random height, each split into rectangles
// of random width, one class per rectangle. Sizes are drawn in base cells;
// the whole patch lattice is shifted by a sub-cell pixel offset so patch
// borders cut through base cells.
CategoricalRaster generate_patchwork(const SyntheticSpec& spec) {
    if (spec.patch_min < 1 || spec.patch_max < spec.patch_min) {
        throw ComputeError("patch size range must satisfy 1 <= min <= max");
    }
    const std::vector<ClassCode> codes = resolve_codes(spec);
    const std::vector<double> cum = cumulative_weights(spec, codes.size());
    CategoricalRaster raster = blank_raster(spec);

    const Eigen::Index f = spec.base_factor;
    const auto span = static_cast<std::uint64_t>(spec.patch_max - spec.patch_min + 1);
    const auto shift_r = static_cast<Eigen::Index>(
        counter_draw(spec.seed, kStreamShift, 0) % static_cast<std::uint64_t>(f));
    const auto shift_c = static_cast<Eigen::Index>(
        counter_draw(spec.seed, kStreamShift, 1) % static_cast<std::uint64_t>(f));

    // Strip index per (shifted) pixel row.
    const Eigen::Index virtual_height = raster.height + shift_r;
    std::vector<std::uint32_t> strip_of_row(static_cast<std::size_t>(virtual_height));
    std::uint32_t strip = 0;
    for (Eigen::Index filled = 0; filled < virtual_height; ++strip) {
        const auto h_cells = spec.patch_min +
                             static_cast<int>(counter_draw(spec.seed, kStreamStripHeight, strip) % span);
        const Eigen::Index h_px = static_cast<Eigen::Index>(h_cells) * f;
        const Eigen::Index end = std::min(filled + h_px, virtual_height);
        std::fill(strip_of_row.begin() + filled, strip_of_row.begin() + end, strip);
        filled = end;
    }

    const bool thin = spec.cropland_fraction < 1.0;
    const Eigen::Index virtual_width = raster.width + shift_c;
    std::vector<ClassCode> strip_codes(static_cast<std::size_t>(virtual_width));
    std::uint32_t current_strip = std::uint32_t(-1);

    for (Eigen::Index r = 0; r < raster.height; ++r) {
        const std::uint32_t s = strip_of_row[static_cast<std::size_t>(r + shift_r)];
        if (s != current_strip) {
            current_strip = s;
            // Lay out this strip's rectangles across the full virtual width.
            const std::uint64_t strip_key = static_cast<std::uint64_t>(s) << 32;
            std::uint64_t rect = 0;
            for (Eigen::Index filled = 0; filled < virtual_width; ++rect) {
                const auto w_cells =
                    spec.patch_min +
                    static_cast<int>(counter_draw(spec.seed, kStreamPatchWidth, strip_key | rect) % span);
                const Eigen::Index w_px = static_cast<Eigen::Index>(w_cells) * f;
                const Eigen::Index end = std::min(filled + w_px, virtual_width);
                const double u = counter_uniform(spec.seed, kStreamPatchClass, strip_key | rect);
                const ClassCode code = codes[pick_class(cum, u)];
                std::fill(strip_codes.begin() + filled, strip_codes.begin() + end, code);
                filled = end;
            }
        }
        ClassCode* row = raster.values.data() + r * raster.width;
        if (!thin) {
            std::copy(strip_codes.begin() + shift_c, strip_codes.begin() + shift_c + raster.width,
                      row);
        } else {
            for (Eigen::Index c = 0; c < raster.width; ++c) {
                const auto counter = static_cast<std::uint64_t>(r * raster.width + c);
                row[c] = counter_uniform(spec.seed, kStreamCropland, counter) < spec.cropland_fraction
                             ? strip_codes[static_cast<std::size_t>(c + shift_c)]
                             : spec.non_cropland_code;
            }
        }
    }
    return raster;
}

} // namespace

CategoricalRaster generate(const SyntheticSpec& spec) {
    switch (spec.kind) {
    case GeneratorKind::Checkerboard:
        return generate_checkerboard(spec);
    case GeneratorKind::Patchwork:
        return generate_patchwork(spec);
    case GeneratorKind::UniformRandom:
        return generate_uniform_random(spec);
    }
    throw ComputeError("unknown generator kind");
}

} // namespace cropdiv

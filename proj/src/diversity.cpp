#include "cropdiv/diversity.hpp"

#include <utility>

namespace cropdiv {

CellEntropy cell_entropy(const CountCube& cube, Eigen::Index cell) {
    CellEntropy term;
    term.cropland = cube.counts.row(cell).sum();
    if (term.cropland > 0) {
        term.entropy = shannon_entropy(cube.counts.row(cell));
    }
    return term;
}

std::vector<CellEntropy> cell_entropies(const CountCube& cube) {
    std::vector<CellEntropy> terms(static_cast<std::size_t>(cube.n_cells()));
    for (Eigen::Index i = 0; i < cube.n_cells(); ++i) {
        terms[static_cast<std::size_t>(i)] = cell_entropy(cube, i);
    }
    return terms;
}

// The cell weight is formed as an explicit double quotient t_i / T, so a
// single-cell unit evaluates exp(1.0 * H) and alpha == gamma bitwise at the
// reference scale.
double alpha_from_terms(const std::vector<CellEntropy>& terms, const UnitSelection& unit) {
    if (unit.empty()) {
        throw ComputeError("alpha over an empty unit selection");
    }
    Count total = 0;
    for (const Eigen::Index i : unit.cells) {
        total += terms[static_cast<std::size_t>(i)].cropland;
    }
    if (total == 0) {
        throw UndefinedUnitError();
    }
    const double t = static_cast<double>(total);
    double acc = 0.0;
    for (const Eigen::Index i : unit.cells) {
        const CellEntropy& term = terms[static_cast<std::size_t>(i)];
        if (term.cropland == 0) {
            continue; // weight 0, entropy undefined
        }
        acc += (static_cast<double>(term.cropland) / t) * term.entropy;
    }
    return std::exp(acc);
}

double alpha_diversity(const CountCube& cube, const UnitSelection& unit) {
    if (unit.empty()) {
        throw ComputeError("alpha over an empty unit selection");
    }
    Count total = 0;
    for (const Eigen::Index i : unit.cells) {
        total += cube.counts.row(i).sum();
    }
    if (total == 0) {
        throw UndefinedUnitError();
    }
    const double t = static_cast<double>(total);
    double acc = 0.0;
    for (const Eigen::Index i : unit.cells) {
        const CellEntropy term = cell_entropy(cube, i);
        if (term.cropland == 0) {
            continue;
        }
        acc += (static_cast<double>(term.cropland) / t) * term.entropy;
    }
    return std::exp(acc);
}

CountVector pooled_counts(const CountCube& cube, const UnitSelection& unit) {
    CountVector pooled = CountVector::Zero(cube.n_classes());
    for (const Eigen::Index i : unit.cells) {
        pooled += cube.counts.row(i).transpose();
    }
    return pooled;
}

double gamma_diversity(const CountCube& cube, const UnitSelection& unit) {
    if (unit.empty()) {
        throw ComputeError("gamma over an empty unit selection");
    }
    return effective_classes(pooled_counts(cube, unit));
}

double beta_diversity(double alpha, double gamma) {
    if (!(alpha > 0.0)) {
        throw ComputeError("beta requires alpha > 0");
    }
    return gamma / alpha;
}

int richness(const CountCube& cube, const UnitSelection& unit) {
    const CountVector pooled = pooled_counts(cube, unit);
    int n = 0;
    for (Eigen::Index j = 0; j < pooled.size(); ++j) {
        if (pooled[j] > 0) ++n;
    }
    return n;
}

Count cropland_pixel_count(const CountCube& cube, const UnitSelection& unit) {
    Count total = 0;
    for (const Eigen::Index i : unit.cells) {
        total += cube.counts.row(i).sum();
    }
    return total;
}

Count total_pixel_count(const CountCube& cube, const UnitSelection& unit) {
    Count total = 0;
    for (const Eigen::Index i : unit.cells) {
        total += cube.total_pixels[i];
    }
    return total;
}

ProportionVector proportions(const CountCube& cube, const UnitSelection& unit) {
    const CountVector pooled = pooled_counts(cube, unit);
    const Count cropland = pooled.sum();
    const Count land = total_pixel_count(cube, unit);

    ProportionVector p;
    p.land = Eigen::VectorXd::Zero(cube.n_classes());
    if (land > 0) {
        p.land = pooled.cast<double>() / static_cast<double>(land);
    }
    if (cropland > 0) {
        p.cropland = pooled.cast<double>() / static_cast<double>(cropland);
    }
    return p;
}

DiversityRecord unit_record(const CountCube& cube, const UnitSelection& unit,
                            std::string unit_id, double scale_m) {
    DiversityRecord rec;
    rec.unit_id = std::move(unit_id);
    rec.scale_m = scale_m;
    rec.n_cells = static_cast<Eigen::Index>(unit.size());
    rec.cropland_pixels = cropland_pixel_count(cube, unit);
    const Count land = total_pixel_count(cube, unit);
    rec.cropland_fraction =
        land > 0 ? static_cast<double>(rec.cropland_pixels) / static_cast<double>(land) : 0.0;
    rec.richness = richness(cube, unit);
    if (rec.cropland_pixels > 0) {
        DiversityValues v;
        v.alpha = alpha_diversity(cube, unit);
        v.gamma = gamma_diversity(cube, unit);
        v.beta = beta_diversity(v.alpha, v.gamma);
        rec.div = v;
    }
    return rec;
}

} // namespace cropdiv

#include "cropdiv/multiscale.hpp"

#include <algorithm>

#include "cropdiv/parallel.hpp"

namespace cropdiv {

void ScaleSet::validate() const {
    if (factors.empty()) {
        throw ComputeError("scale set is empty");
    }
    for (std::size_t k = 0; k < factors.size(); ++k) {
        if (factors[k] < 1) {
            throw ComputeError("scale factors must be >= 1");
        }
        if (k > 0 && factors[k] <= factors[k - 1]) {
            throw ComputeError("scale factors must be strictly increasing");
        }
    }
}

UnitSelection BlockGrid::unit(Eigen::Index block_row, Eigen::Index block_col) const {
    const Eigen::Index f = factor;
    const Eigen::Index row_end = std::min((block_row + 1) * f, grid_rows);
    const Eigen::Index col_end = std::min((block_col + 1) * f, grid_cols);
    UnitSelection u;
    u.cells.reserve(static_cast<std::size_t>((row_end - block_row * f) * (col_end - block_col * f)));
    for (Eigen::Index r = block_row * f; r < row_end; ++r) {
        for (Eigen::Index c = block_col * f; c < col_end; ++c) {
            u.cells.push_back(r * grid_cols + c);
        }
    }
    return u;
}

BlockGrid block_partition(const CountCube& cube, int factor) {
    if (factor < 1) {
        throw ComputeError("block factor must be >= 1");
    }
    BlockGrid grid;
    grid.factor = factor;
    grid.grid_rows = cube.grid_rows;
    grid.grid_cols = cube.grid_cols;
    grid.block_rows = (cube.grid_rows + factor - 1) / factor;
    grid.block_cols = (cube.grid_cols + factor - 1) / factor;
    return grid;
}

namespace {

GridRecord block_record(const CountCube& cube, const std::vector<CellEntropy>& terms,
                        const BlockGrid& grid, Eigen::Index block_row, Eigen::Index block_col,
                        double min_cropland_fraction) {
    GridRecord rec;
    rec.factor = grid.factor;
    rec.scale_m = cube.cell_size * static_cast<double>(grid.factor);
    rec.block_row = block_row;
    rec.block_col = block_col;

    const UnitSelection unit = grid.unit(block_row, block_col);
    rec.n_cells = static_cast<Eigen::Index>(unit.size());
    for (const Eigen::Index i : unit.cells) {
        rec.cropland_pixels += terms[static_cast<std::size_t>(i)].cropland;
        rec.total_pixels += cube.total_pixels[i];
    }
    rec.cropland_fraction =
        rec.total_pixels > 0
            ? static_cast<double>(rec.cropland_pixels) / static_cast<double>(rec.total_pixels)
            : 0.0;

    const Count full_coverage = static_cast<Count>(grid.factor) * grid.factor *
                                cube.base_factor * cube.base_factor;
    rec.partial = rec.total_pixels < full_coverage;
    rec.filtered = rec.cropland_fraction < min_cropland_fraction;

    if (!rec.filtered) {
        rec.richness = richness(cube, unit);
        if (rec.cropland_pixels > 0) {
            DiversityValues v;
            v.alpha = alpha_from_terms(terms, unit);
            v.gamma = gamma_diversity(cube, unit);
            v.beta = beta_diversity(v.alpha, v.gamma);
            rec.div = v;
        }
    }
    return rec;
}

} // namespace

std::vector<GridRecord> scale_sweep(const CountCube& cube, const ScaleSet& scales,
                                    double min_cropland_fraction, int threads) {
    scales.validate();
    if (min_cropland_fraction < 0.0 || min_cropland_fraction >= 1.0) {
        throw ComputeError("min_cropland_fraction must lie in [0, 1)");
    }

    const std::vector<CellEntropy> terms = cell_entropies(cube);

    std::vector<GridRecord> records;
    std::size_t total_blocks = 0;
    std::vector<BlockGrid> grids;
    grids.reserve(scales.factors.size());
    for (const int factor : scales.factors) {
        grids.push_back(block_partition(cube, factor));
        total_blocks += static_cast<std::size_t>(grids.back().n_blocks());
    }
    records.resize(total_blocks);

    // Every block owns one preassigned slot, so the canonical order (scale
    // ascending, block row-major) holds for any parallel schedule.
    std::size_t offset = 0;
    for (const BlockGrid& grid : grids) {
        GridRecord* out = records.data() + offset;
        parallel_chunks(grid.block_rows, threads, [&](Eigen::Index row_begin, Eigen::Index row_end) {
            for (Eigen::Index br = row_begin; br < row_end; ++br) {
                for (Eigen::Index bc = 0; bc < grid.block_cols; ++bc) {
                    out[br * grid.block_cols + bc] =
                        block_record(cube, terms, grid, br, bc, min_cropland_fraction);
                }
            }
        });
        offset += static_cast<std::size_t>(grid.n_blocks());
    }
    return records;
}

} // namespace cropdiv

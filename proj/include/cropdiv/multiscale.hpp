#pragma once

#include <optional>
#include <vector>

#include "cropdiv/diversity.hpp"
#include "cropdiv/types.hpp"

namespace cropdiv {

/// Block-edge factors (in base cells), strictly increasing.
struct ScaleSet {
    std::vector<int> factors;

    static ScaleSet defaults() { return ScaleSet{{1, 2, 5, 10, 20, 50, 100}}; }

    void validate() const;
};

/// Partition of the base-cell lattice into factor x factor blocks anchored at
/// the lattice origin; edge blocks are clipped.
struct BlockGrid {
    int factor = 1;
    Eigen::Index block_rows = 0;
    Eigen::Index block_cols = 0;
    Eigen::Index grid_rows = 0; // base-cell lattice shape
    Eigen::Index grid_cols = 0;

    Eigen::Index n_blocks() const { return block_rows * block_cols; }

    /// Base cells of block (R, C) in ascending cell-index order.
    UnitSelection unit(Eigen::Index block_row, Eigen::Index block_col) const;
};

BlockGrid block_partition(const CountCube& cube, int factor);

/// One block's diversity at one scale. Metrics are absent when the block was
/// filtered out (cropland fraction below threshold) or holds no cropland.
struct GridRecord {
    int factor = 1;
    double scale_m = 0.0;
    Eigen::Index block_row = 0;
    Eigen::Index block_col = 0;
    Eigen::Index n_cells = 0;
    Count cropland_pixels = 0;
    Count total_pixels = 0;
    double cropland_fraction = 0.0;
    std::optional<DiversityValues> div;
    std::optional<int> richness;
    bool partial = false;  // pixel coverage below factor^2 * base_factor^2
    bool filtered = false; // cropland fraction below the threshold
};

/// Per-block alpha/gamma/beta at every scale. Alpha is always computed from
/// the base cells (the reference scale); gamma from the block's pooled
/// counts. Records come out in canonical order: scale ascending, then block
/// row-major. The result is identical for any thread count.
std::vector<GridRecord> scale_sweep(const CountCube& cube, const ScaleSet& scales,
                                    double min_cropland_fraction, int threads = 1);

} // namespace cropdiv

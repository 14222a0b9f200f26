#pragma once

#include <optional>
#include <vector>

#include "cropdiv/multiscale.hpp"
#include "cropdiv/types.hpp"

namespace cropdiv {

/// Zone-level diversity after border-cell discard. Metrics are absent when
/// the zone keeps no cropland above the threshold. A border cell counts as
/// discarded for every zone it straddles; the discarded fraction is taken
/// over retained + discarded cells of the zone.
struct ZoneReport {
    std::int32_t zone = 0;
    Eigen::Index n_cells = 0;         // retained (non-border) cells
    Eigen::Index discarded_cells = 0; // border cells touching the zone
    double discarded_fraction = 0.0;
    std::optional<DiversityValues> div;
    std::optional<int> richness;
    Count cropland_pixels = 0;
    double cropland_fraction = 0.0;
};

/// One report per zone label, ascending. Border and outside cells never enter
/// the unit selection.
std::vector<ZoneReport> zone_diversity(const CountCube& cube, const ZoneMap& zones,
                                       double min_cropland_fraction);

/// Arithmetic means of grid-scale diversity within each zone. Each retained
/// block is assigned to the zone holding the strict majority of its
/// non-border, non-outside base cells; ties leave the block unassigned.
struct ZoneScaleMean {
    std::int32_t zone = 0;
    int factor = 1;
    double scale_m = 0.0;
    Eigen::Index n_blocks = 0;
    std::optional<double> mean_alpha;
    std::optional<double> mean_gamma;
    std::optional<double> mean_beta;
};

std::vector<ZoneScaleMean> zone_scale_means(const std::vector<GridRecord>& records,
                                            const CountCube& cube, const ZoneMap& zones);

/// Majority-rule zone of one block, or nullopt on a tie / no zoned cells.
std::optional<std::int32_t> block_zone(const BlockGrid& grid, const ZoneMap& zones,
                                       Eigen::Index block_row, Eigen::Index block_col);

/// Retained (non-border, non-outside) cells of one zone, ascending.
UnitSelection zone_unit(const ZoneMap& zones, std::int32_t zone);

/// Distinct zone labels present in the map, ascending.
std::vector<std::int32_t> zone_labels(const ZoneMap& zones);

} // namespace cropdiv

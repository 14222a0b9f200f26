#include "cropdiv/zonal.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace cropdiv {

std::vector<std::int32_t> zone_labels(const ZoneMap& zones) {
    std::set<std::int32_t> labels;
    for (Eigen::Index i = 0; i < zones.n_cells(); ++i) {
        if (zones.assignment[i] >= 0) {
            labels.insert(zones.assignment[i]);
        }
    }
    // Zones may exist solely through border cells (fully discarded).
    for (const auto& [cell, touched] : zones.border_touches) {
        labels.insert(touched.begin(), touched.end());
    }
    return {labels.begin(), labels.end()};
}

UnitSelection zone_unit(const ZoneMap& zones, std::int32_t zone) {
    UnitSelection u;
    for (Eigen::Index i = 0; i < zones.n_cells(); ++i) {
        if (zones.assignment[i] == zone) {
            u.cells.push_back(i);
        }
    }
    return u;
}

std::vector<ZoneReport> zone_diversity(const CountCube& cube, const ZoneMap& zones,
                                       double min_cropland_fraction) {
    if (zones.n_cells() != cube.n_cells()) {
        throw ComputeError("zone map does not align with the cube lattice");
    }
    if (min_cropland_fraction < 0.0 || min_cropland_fraction >= 1.0) {
        throw ComputeError("min_cropland_fraction must lie in [0, 1)");
    }

    std::map<std::int32_t, Eigen::Index> discarded;
    for (const auto& [cell, touched] : zones.border_touches) {
        for (const std::int32_t z : touched) {
            ++discarded[z];
        }
    }

    std::vector<ZoneReport> reports;
    for (const std::int32_t zone : zone_labels(zones)) {
        ZoneReport rep;
        rep.zone = zone;
        const UnitSelection unit = zone_unit(zones, zone);
        rep.n_cells = static_cast<Eigen::Index>(unit.size());
        if (const auto it = discarded.find(zone); it != discarded.end()) {
            rep.discarded_cells = it->second;
        }
        const Eigen::Index footprint = rep.n_cells + rep.discarded_cells;
        rep.discarded_fraction =
            footprint > 0 ? static_cast<double>(rep.discarded_cells) /
                                static_cast<double>(footprint)
                          : 0.0;
        if (!unit.empty()) {
            rep.cropland_pixels = cropland_pixel_count(cube, unit);
            const Count land = total_pixel_count(cube, unit);
            rep.cropland_fraction =
                land > 0 ? static_cast<double>(rep.cropland_pixels) / static_cast<double>(land)
                         : 0.0;
            if (rep.cropland_fraction >= min_cropland_fraction) {
                rep.richness = richness(cube, unit);
                if (rep.cropland_pixels > 0) {
                    DiversityValues v;
                    v.alpha = alpha_diversity(cube, unit);
                    v.gamma = gamma_diversity(cube, unit);
                    v.beta = beta_diversity(v.alpha, v.gamma);
                    rep.div = v;
                }
            }
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

std::optional<std::int32_t> block_zone(const BlockGrid& grid, const ZoneMap& zones,
                                       Eigen::Index block_row, Eigen::Index block_col) {
    std::map<std::int32_t, Eigen::Index> votes;
    for (const Eigen::Index i : grid.unit(block_row, block_col).cells) {
        if (zones.assignment[i] >= 0) {
            ++votes[zones.assignment[i]];
        }
    }
    if (votes.empty()) {
        return std::nullopt;
    }
    std::optional<std::int32_t> winner;
    Eigen::Index best = 0;
    bool tied = false;
    for (const auto& [zone, n] : votes) {
        if (n > best) {
            best = n;
            winner = zone;
            tied = false;
        } else if (n == best) {
            tied = true;
        }
    }
    if (tied) {
        return std::nullopt;
    }
    return winner;
}

std::vector<ZoneScaleMean> zone_scale_means(const std::vector<GridRecord>& records,
                                            const CountCube& cube, const ZoneMap& zones) {
    if (zones.n_cells() != cube.n_cells()) {
        throw ComputeError("zone map does not align with the cube lattice");
    }

    // Canonical record order makes the means independent of how the caller
    // ordered the stream.
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const GridRecord& ra = records[a];
        const GridRecord& rb = records[b];
        return std::tie(ra.factor, ra.block_row, ra.block_col) <
               std::tie(rb.factor, rb.block_row, rb.block_col);
    });

    struct Sums {
        Eigen::Index n = 0;
        double alpha = 0.0, gamma = 0.0, beta = 0.0;
    };
    std::map<std::pair<std::int32_t, int>, Sums> sums;
    std::map<int, BlockGrid> grids;
    std::set<int> factors;

    for (const std::size_t k : order) {
        const GridRecord& rec = records[k];
        factors.insert(rec.factor);
        if (rec.filtered || !rec.div) {
            continue; // filtered blocks leave both numerator and denominator
        }
        auto grid_it = grids.find(rec.factor);
        if (grid_it == grids.end()) {
            grid_it = grids.emplace(rec.factor, block_partition(cube, rec.factor)).first;
        }
        const auto zone = block_zone(grid_it->second, zones, rec.block_row, rec.block_col);
        if (!zone) {
            continue;
        }
        Sums& s = sums[{*zone, rec.factor}];
        ++s.n;
        s.alpha += rec.div->alpha;
        s.gamma += rec.div->gamma;
        s.beta += rec.div->beta;
    }

    std::vector<ZoneScaleMean> means;
    for (const std::int32_t zone : zone_labels(zones)) {
        for (const int factor : factors) {
            ZoneScaleMean m;
            m.zone = zone;
            m.factor = factor;
            m.scale_m = cube.cell_size * static_cast<double>(factor);
            if (const auto it = sums.find({zone, factor}); it != sums.end()) {
                m.n_blocks = it->second.n;
                const double n = static_cast<double>(it->second.n);
                m.mean_alpha = it->second.alpha / n;
                m.mean_gamma = it->second.gamma / n;
                m.mean_beta = it->second.beta / n;
            }
            means.push_back(m);
        }
    }
    return means;
}

} // namespace cropdiv

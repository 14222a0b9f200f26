#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cropdiv/types.hpp"

namespace cropdiv {

/// Position of a region relative to the reference in the
/// (delta avg, delta std) plane. Exact zeros land on AXIS.
enum class Quadrant { Q1, Q2, Q3, Q4, Axis };

const char* quadrant_name(Quadrant q);

/// Cross-scale summary of a region's gamma profile against a reference
/// profile over the identical scale set.
struct ScaleProfile {
    std::string region;
    double avg_gamma = 0.0;
    double std_gamma = 0.0; // population standard deviation over scales
    double delta_avg = 0.0; // region minus reference
    double delta_std = 0.0;
    Quadrant quadrant = Quadrant::Axis;
};

/// Both maps are keyed by scale factor and must share an identical key set of
/// size >= 2.
ScaleProfile scale_profile(std::string region, const std::map<int, double>& gamma_by_scale,
                           const std::map<int, double>& reference_by_scale);

/// Mean and population standard deviation of the values of a scale->gamma
/// map (at least 2 entries).
std::pair<double, double> profile_moments(const std::map<int, double>& gamma_by_scale);

/// Empirical CDF of a sample: sorted values with cumulative probabilities
/// k/n for k = 1..n.
struct EcdfTable {
    std::string metric;
    double scale_m = 0.0;
    std::vector<double> values;    // ascending
    std::vector<double> cum_prob;  // non-decreasing, ends at 1
    std::size_t sample_size = 0;
};

EcdfTable ecdf(std::string metric, double scale_m, std::vector<double> sample);

/// P(x <= v) under the ECDF.
double ecdf_probability(const EcdfTable& table, double v);

/// Quantile by inversion: the lowest sample value with cumulative
/// probability >= p.
double ecdf_quantile(const EcdfTable& table, double p);

struct CovariateRow {
    std::string region;
    double covariate = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
};

/// Scatter pairs of region-level diversity against a covariate. No fitting,
/// no correlation; unmatched keys from either side are listed separately.
struct CovariateJoin {
    std::vector<CovariateRow> rows;                 // ordered by region id
    std::vector<std::string> unmatched_records;     // records without covariate
    std::vector<std::string> unmatched_covariates;  // covariates without record
};

CovariateJoin covariate_join(const std::vector<DiversityRecord>& records,
                             const std::vector<std::pair<std::string, double>>& covariates);

} // namespace cropdiv

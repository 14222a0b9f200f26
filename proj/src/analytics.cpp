#include "cropdiv/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cropdiv/errors.hpp"

namespace cropdiv {

const char* quadrant_name(Quadrant q) {
    switch (q) {
    case Quadrant::Q1: return "Q1";
    case Quadrant::Q2: return "Q2";
    case Quadrant::Q3: return "Q3";
    case Quadrant::Q4: return "Q4";
    case Quadrant::Axis: return "AXIS";
    }
    return "AXIS";
}

std::pair<double, double> profile_moments(const std::map<int, double>& gamma_by_scale) {
    if (gamma_by_scale.size() < 2) {
        throw ComputeError("scale profile needs at least 2 scales");
    }
    const double n = static_cast<double>(gamma_by_scale.size());
    double sum = 0.0;
    for (const auto& [scale, g] : gamma_by_scale) {
        sum += g;
    }
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& [scale, g] : gamma_by_scale) {
        sq += (g - mean) * (g - mean);
    }
    return {mean, std::sqrt(sq / n)};
}

ScaleProfile scale_profile(std::string region, const std::map<int, double>& gamma_by_scale,
                           const std::map<int, double>& reference_by_scale) {
    if (gamma_by_scale.size() != reference_by_scale.size() ||
        !std::equal(gamma_by_scale.begin(), gamma_by_scale.end(), reference_by_scale.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
        throw ComputeError("region and reference profiles cover different scale sets");
    }

    ScaleProfile profile;
    profile.region = std::move(region);
    const auto [avg, std_dev] = profile_moments(gamma_by_scale);
    const auto [ref_avg, ref_std] = profile_moments(reference_by_scale);
    profile.avg_gamma = avg;
    profile.std_gamma = std_dev;
    profile.delta_avg = avg - ref_avg;
    profile.delta_std = std_dev - ref_std;

    if (profile.delta_avg == 0.0 || profile.delta_std == 0.0) {
        profile.quadrant = Quadrant::Axis;
    } else if (profile.delta_avg < 0.0) {
        profile.quadrant = profile.delta_std > 0.0 ? Quadrant::Q1 : Quadrant::Q4;
    } else {
        profile.quadrant = profile.delta_std > 0.0 ? Quadrant::Q2 : Quadrant::Q3;
    }
    return profile;
}

EcdfTable ecdf(std::string metric, double scale_m, std::vector<double> sample) {
    if (sample.empty()) {
        throw ComputeError("ECDF of an empty sample");
    }
    for (const double v : sample) {
        if (std::isnan(v)) {
            throw ComputeError("ECDF sample contains NaN");
        }
    }
    EcdfTable table;
    table.metric = std::move(metric);
    table.scale_m = scale_m;
    table.sample_size = sample.size();
    std::sort(sample.begin(), sample.end());
    table.values = std::move(sample);
    table.cum_prob.resize(table.values.size());
    const double n = static_cast<double>(table.values.size());
    for (std::size_t k = 0; k < table.values.size(); ++k) {
        table.cum_prob[k] = static_cast<double>(k + 1) / n;
    }
    return table;
}

double ecdf_probability(const EcdfTable& table, double v) {
    const auto it = std::upper_bound(table.values.begin(), table.values.end(), v);
    return static_cast<double>(it - table.values.begin()) /
           static_cast<double>(table.values.size());
}

double ecdf_quantile(const EcdfTable& table, double p) {
    if (p < 0.0 || p > 1.0) {
        throw ComputeError("quantile probability must lie in [0, 1]");
    }
    const auto it = std::lower_bound(table.cum_prob.begin(), table.cum_prob.end(), p);
    const std::size_t k = it == table.cum_prob.end()
                              ? table.values.size() - 1
                              : static_cast<std::size_t>(it - table.cum_prob.begin());
    return table.values[k];
}

CovariateJoin covariate_join(const std::vector<DiversityRecord>& records,
                             const std::vector<std::pair<std::string, double>>& covariates) {
    std::map<std::string, double> table;
    for (const auto& [region, value] : covariates) {
        if (!table.emplace(region, value).second) {
            throw FormatError("duplicate region key '" + region + "' in covariate table");
        }
    }

    CovariateJoin join;
    std::set<std::string> matched;
    std::map<std::string, const DiversityRecord*> by_region;
    for (const DiversityRecord& rec : records) {
        if (!by_region.emplace(rec.unit_id, &rec).second) {
            throw ComputeError("duplicate region id '" + rec.unit_id + "' in record stream");
        }
    }

    for (const auto& [region, rec] : by_region) {
        const auto it = table.find(region);
        if (it == table.end() || !rec->div) {
            join.unmatched_records.push_back(region);
            continue;
        }
        matched.insert(region);
        join.rows.push_back(
            {region, it->second, rec->div->alpha, rec->div->gamma, rec->div->beta});
    }
    for (const auto& [region, value] : table) {
        if (!matched.contains(region)) {
            join.unmatched_covariates.push_back(region);
        }
    }
    return join;
}

} // namespace cropdiv

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cropdiv/errors.hpp"
#include "cropdiv/types.hpp"

namespace cropdiv {

/// Shannon entropy -sum q ln q of a non-negative count expression, with
/// q = v_j / sum(v). Zero entries contribute zero (never ln 0). Terms
/// accumulate over counts sorted descending, so the result depends only on
/// the multiset of counts, not on class order.
template <typename Derived>
double shannon_entropy(const Eigen::MatrixBase<Derived>& counts) {
    using Scalar = typename Derived::Scalar;
    std::vector<Scalar> positive;
    positive.reserve(static_cast<std::size_t>(counts.size()));
    Scalar total{0};
    for (Eigen::Index k = 0; k < counts.size(); ++k) {
        const Scalar c = counts.derived().coeff(k);
        if (c < Scalar{0}) {
            throw ComputeError("entropy input has a negative count");
        }
        if (c > Scalar{0}) {
            positive.push_back(c);
            total += c;
        }
    }
    if (positive.empty()) {
        throw UndefinedUnitError("entropy of an all-zero count vector is undefined");
    }
    std::sort(positive.begin(), positive.end(), std::greater<Scalar>());
    const double t = static_cast<double>(total);
    double entropy = 0.0;
    for (const Scalar c : positive) {
        const double q = static_cast<double>(c) / t;
        entropy -= q * std::log(q);
    }
    return entropy;
}

/// Effective number of classes: exp of the Shannon entropy.
template <typename Derived>
double effective_classes(const Eigen::MatrixBase<Derived>& counts) {
    return std::exp(shannon_entropy(counts));
}

/// Per-cell ingredients of the weighted-entropy mean: the cell's cropland
/// pixel count and its Shannon entropy. Cells with no cropland carry
/// entropy 0 and weight 0 downstream.
struct CellEntropy {
    Count cropland = 0;
    double entropy = 0.0;
};

CellEntropy cell_entropy(const CountCube& cube, Eigen::Index cell);

/// All cells' entropy terms in cell order; lets multi-scale sweeps reuse the
/// reference-scale arithmetic instead of recomputing it per block.
std::vector<CellEntropy> cell_entropies(const CountCube& cube);

/// Local diversity: exp of the cropland-weighted mean of per-cell entropies.
/// Throws UndefinedUnitError when the unit holds no cropland.
double alpha_diversity(const CountCube& cube, const UnitSelection& unit);

/// Same, over precomputed cell terms (bit-identical to alpha_diversity).
double alpha_from_terms(const std::vector<CellEntropy>& terms, const UnitSelection& unit);

/// Regional diversity: effective classes of the unit's pooled count vector.
double gamma_diversity(const CountCube& cube, const UnitSelection& unit);

/// beta = gamma / alpha.
double beta_diversity(double alpha, double gamma);

/// Pooled counts per class over the unit (exact integer sums).
CountVector pooled_counts(const CountCube& cube, const UnitSelection& unit);

/// Number of classes with pooled count > 0 (0 for cropland-free units).
int richness(const CountCube& cube, const UnitSelection& unit);

ProportionVector proportions(const CountCube& cube, const UnitSelection& unit);

Count cropland_pixel_count(const CountCube& cube, const UnitSelection& unit);
Count total_pixel_count(const CountCube& cube, const UnitSelection& unit);

/// Assembles the full record for a unit; diversity values are absent (not
/// 0/NaN) when the unit has no cropland.
DiversityRecord unit_record(const CountCube& cube, const UnitSelection& unit,
                            std::string unit_id, double scale_m);

} // namespace cropdiv

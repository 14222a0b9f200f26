#include "cropdiv/oracle.hpp"

#include <cmath>
#include <vector>

#include "cropdiv/errors.hpp"

namespace cropdiv {

OracleDiversity oracle_diversity(const CountCube& cube, const UnitSelection& unit) {
    if (unit.empty()) {
        throw ComputeError("oracle over an empty unit selection");
    }
    const std::size_t m = unit.size();
    const auto s = static_cast<std::size_t>(cube.n_classes());

    // Per-cell cropland totals and the grand total, all in double.
    std::vector<double> cell_total(m, 0.0);
    double grand_total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            cell_total[i] += static_cast<double>(
                cube.counts(unit.cells[i], static_cast<Eigen::Index>(j)));
        }
        grand_total += cell_total[i];
    }
    if (grand_total <= 0.0) {
        throw UndefinedUnitError();
    }

    // p_ij = c_ij / cell total; w_i = cell total / grand total.
    std::vector<std::vector<double>> p(m, std::vector<double>(s, 0.0));
    std::vector<double> w(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        w[i] = cell_total[i] / grand_total;
        if (cell_total[i] > 0.0) {
            for (std::size_t j = 0; j < s; ++j) {
                p[i][j] = static_cast<double>(
                              cube.counts(unit.cells[i], static_cast<Eigen::Index>(j))) /
                          cell_total[i];
            }
        }
    }

    // alpha = exp(-sum_i w_i sum_j p_ij ln p_ij)
    double alpha_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (cell_total[i] <= 0.0) continue; // weight 0
        double inner = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            if (p[i][j] > 0.0) {
                inner += p[i][j] * std::log(p[i][j]);
            }
        }
        alpha_sum += w[i] * inner;
    }

    // gamma = exp(sum_j (-sum_i w_i p_ij) ln(sum_i w_i p_ij))
    double gamma_sum = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
        double mixed = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            mixed += w[i] * p[i][j];
        }
        if (mixed > 0.0) {
            gamma_sum += -mixed * std::log(mixed);
        }
    }

    OracleDiversity result;
    result.alpha = std::exp(-alpha_sum);
    result.gamma = std::exp(gamma_sum);
    result.beta = result.gamma / result.alpha;
    return result;
}

} // namespace cropdiv

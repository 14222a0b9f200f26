#pragma once

#include "cropdiv/types.hpp"

namespace cropdiv {

struct OracleDiversity {
    double alpha = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
};

/// Brute-force diversity of a unit, written directly from the weighted
/// formulation: explicit per-cell proportions p_ij and weights w_i, gamma
/// from the mixture sum(w_i * p_ij). Shares no arithmetic with the engine
/// (which pools integer counts), so agreement cross-checks both
/// transcriptions. Intended for small units; clarity over speed.
OracleDiversity oracle_diversity(const CountCube& cube, const UnitSelection& unit);

} // namespace cropdiv

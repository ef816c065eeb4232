#pragma once

#include "optbench/garch.hpp"
#include "optbench/regime.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace optbench {

/// Two-regime MS-AR sample path; returns both the observations and the true
/// regime sequence (for recovery checks).
struct MsArSimulation {
    std::vector<double> returns;
    std::vector<int> regimes;
};

MsArSimulation simulate_msar(const MsArParams& params, std::size_t length,
                             std::mt19937_64& rng);

/// GARCH/GJR-GARCH path with standardized (unit-variance) Student-t
/// innovations of the given shape; eta <= 0 means Gaussian innovations.
std::vector<double> simulate_garch(const GarchParams& params, const GarchSpec& spec,
                                   std::size_t length, std::mt19937_64& rng,
                                   std::size_t burn_in = 500);

} // namespace optbench

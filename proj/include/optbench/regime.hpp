#pragma once

#include "optbench/market_data.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace optbench {

struct MsArSpec {
    int ar_order = 1; ///< a >= 1 and a < series length / 10
};

/// Two-regime MS-AR parameters in natural space.
struct MsArParams {
    std::array<double, 2> mu{};                   ///< per-regime intercept
    std::array<std::vector<double>, 2> phi{};     ///< per-regime AR coefficients
    std::array<double, 2> sigma2{};               ///< innovation variances (> 0)
    double p00 = 0.9;                             ///< Pr(0 -> 0)
    double p11 = 0.9;                             ///< Pr(1 -> 1)

    std::array<double, 2> stationary_distribution() const;
};

struct HamiltonFilterResult {
    double loglik = 0;
    std::vector<std::array<double, 2>> predicted; ///< xi_{t|t-1}
    std::vector<std::array<double, 2>> filtered;  ///< xi_{t|t}
    std::vector<double> log_cond_density;         ///< per-observation log c_t
};

/// Scaled forward filter over observations t = a .. T-1 (the first a returns
/// condition the AR mean). Initial regime distribution defaults to the
/// stationary distribution of the chain.
HamiltonFilterResult hamilton_filter(
    const MsArParams& params, std::span<const double> returns, int ar_order,
    std::optional<std::array<double, 2>> initial_distribution = std::nullopt);

/// Kim backward smoother on top of the forward filter.
std::vector<std::array<double, 2>> kim_smooth(const MsArParams& params,
                                              const HamiltonFilterResult& filter);

/// Filter + smoother in one call (Eq. contract: rows sum to 1).
std::vector<std::array<double, 2>> hamilton_smooth(
    const MsArParams& params, std::span<const double> returns, int ar_order,
    std::optional<std::array<double, 2>> initial_distribution = std::nullopt);

struct MsArFitOptions {
    std::size_t starts = 8;          ///< multi-start count
    std::size_t max_iterations = 2000;
    bool compute_std_errors = true;  ///< sandwich (HAC-free OPG) standard errors
    double variance_floor = 1e-8;    ///< degenerate-regime guard
};

struct MsArFit {
    MsArSpec spec;
    MsArParams params;
    /// Robust standard errors in natural space, packed as
    /// [mu0, phi0_1..a, sigma2_0, mu1, phi1_1..a, sigma2_1, p00, p11].
    std::vector<double> std_errors;
    std::vector<std::array<double, 2>> smoothed;
    std::vector<Date> dates; ///< dates aligned with the smoothed path
    double loglik = 0;
    double aic = 0;
    double bic = 0;
    std::size_t n_obs = 0;    ///< T - a likelihood observations
    std::size_t n_params = 0; ///< k = 2(a + 2) + 2
};

/// Maximum-likelihood fit with multi-start L-BFGS; variances run through a
/// log transform and transition probabilities through a logistic transform.
MsArFit fit_msar(const ReturnSeries& series, const MsArSpec& spec, std::uint64_t seed,
                 const MsArFitOptions& options = {});

constexpr int kRegimeUncertain = -1;

struct RegimeLabels {
    std::vector<Date> dates;
    std::vector<int> labels;                   ///< 0, 1, or kRegimeUncertain
    int high_volatility_regime = 1;            ///< index with larger sigma^2
    std::array<double, 2> expected_duration{}; ///< 1 / (1 - p_ss)
};

/// argmax classification with the > 0.5 certainty rule, variance-ordered
/// regime names, and expected durations.
RegimeLabels classify(const MsArFit& fit);

} // namespace optbench

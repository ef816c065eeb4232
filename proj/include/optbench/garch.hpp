#pragma once

#include "optbench/market_data.hpp"
#include "optbench/regime.hpp"

#include <cstdint>
#include <vector>

namespace optbench {

/// Hansen standardized skewed-t: shape eta > 2, skew lambda in (-1, 1),
/// zero mean, unit variance. lambda = 0 reduces to the standardized
/// Student-t.
double skewed_t_log_pdf(double z, double eta, double lambda);
double skewed_t_pdf(double z, double eta, double lambda);

struct GarchSpec {
    int p = 1; ///< ARCH order
    int o = 0; ///< GJR order (0 = plain GARCH)
    int q = 1; ///< GARCH order

    int param_count() const { return 2 + p + o + q + 2; } // mu, omega, ..., eta, lambda
};

struct GarchParams {
    double mu = 0;
    double omega = 0; ///< floored at 1e-12
    std::vector<double> alpha; ///< >= 0
    std::vector<double> gamma; ///< unrestricted sign
    std::vector<double> beta;  ///< >= 0
    double eta = 6;    ///< > 2
    double lambda = 0; ///< in (-1, 1)

    /// Sum(alpha) + Sum(beta) + 0.5 * Sum(gamma): < 1 for covariance
    /// stationarity.
    double persistence() const;
};

struct GarchFit {
    GarchSpec spec;
    GarchParams params;
    /// Asymptotic standard errors (inverse observed information, delta
    /// method), packed [mu, omega, alpha.., gamma.., beta.., eta, lambda].
    std::vector<double> std_errors;
    std::vector<double> sigma2;    ///< conditional-variance path
    std::vector<double> std_resid; ///< (r_t - mu) / sigma_t
    double loglik = 0;
    double aic = 0;
    double bic = 0;
    bool converged = false;
    bool stationary = false;
    double persistence = 0;
    // diagnostics on standardized residuals
    double ljung_box_stat = 0;
    double ljung_box_p = 0;
    double arch_stat = 0;
    double arch_p = 0;
};

struct GarchFitOptions {
    std::size_t restarts = 3;      ///< perturbed retries after a failed start
    std::size_t max_iterations = 2000;
    bool compute_std_errors = true;
    std::size_t diagnostic_lags = 10;
    std::size_t min_length = 200;  ///< identification guard
};

/// Variance recursion given parameters and demeaned returns; presample
/// epsilon = 0, presample variance = mean squared residual of the sample.
std::vector<double> garch_variance_path(const GarchParams& params, const GarchSpec& spec,
                                        std::span<const double> returns);

/// Total log-likelihood under the standardized skewed-t density. Returns
/// -inf for parameter points where the recursion loses positivity.
double garch_loglik(const GarchParams& params, const GarchSpec& spec,
                    std::span<const double> returns);

GarchFit fit_garch(const ReturnSeries& subsample, const GarchSpec& spec,
                   std::uint64_t seed, const GarchFitOptions& options = {});

struct GarchGrid {
    int p_max = 10; ///< p in 1..p_max
    int o_max = 5;  ///< o in 0..o_max
    int q_max = 10; ///< q in 1..q_max
};

struct BicSelection {
    GarchSpec spec;
    GarchFit fit;
    std::size_t fits_tried = 0;
    std::size_t fits_admissible = 0;
};

/// Minimal-BIC spec over the grid; only converged, stationary fits are
/// admissible. Ties break by smaller p+o+q, then smaller o, then smaller q.
BicSelection select_by_bic(const ReturnSeries& subsample, std::uint64_t seed,
                           const GarchGrid& grid = {},
                           const GarchFitOptions& options = {});

struct TestResult {
    double statistic = 0;
    double p_value = 0;
};

/// Ljung-Box Q against chi-square(lags).
TestResult ljung_box(std::span<const double> residuals, std::size_t lags);

/// Engle's ARCH LM test: squared residuals on their own lags.
TestResult engle_arch(std::span<const double> residuals, std::size_t lags);

struct VolPoint {
    Date date = 0;
    double sigma_annualized = 0; ///< decimal, e.g. 0.65
    int regime = kRegimeUncertain;
};

struct VolatilityPath {
    std::vector<VolPoint> points;
    /// Lookup by date; throws DataError naming the date when absent.
    double sigma_at(Date d) const;
};

/// Per-day annualized volatility from the regime-labeled days and the
/// per-regime fits (fits indexed by regime). Uncertain days inherit the most
/// recent labeled day. sigma = sqrt(factor * sigma2_daily) / 100 because
/// returns are in percent.
VolatilityPath build_vol_path(const RegimeLabels& labels,
                              const std::array<GarchFit, 2>& fits,
                              double annualization_factor = 365.0);

/// Rolling realized volatility over `window` days, annualized with the same
/// factor; companion series for the volatility-dynamics plots.
std::vector<VolPoint> rolling_realized_vol(const ReturnSeries& series, int window = 7,
                                           double annualization_factor = 365.0);

} // namespace optbench

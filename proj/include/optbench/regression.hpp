#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace optbench {

struct OlsFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd residuals;
    Eigen::VectorXd fitted;
    double r2 = 0;
    double condition_number = 0;
};

/// Least squares via column-pivoted QR; throws EstimationError on rank
/// deficiency or condition number above 1e8.
OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Bartlett-kernel HAC covariance of the OLS/WLS coefficient vector.
/// L = 0 reduces exactly to the White heteroskedasticity-only estimator.
/// Observations must already be in their temporal order.
Eigen::MatrixXd newey_west_cov(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                               int bandwidth);

/// Newey-West automatic bandwidth: floor(4 * (n/100)^(2/9)).
int newey_west_auto_bandwidth(std::size_t n);

struct FglsOptions {
    int hac_bandwidth = -1;             ///< -1: automatic rule
    bool force_constant_omega = false;  ///< diagnostic mode: GLS collapses to OLS
    double variance_floor_scale = 1e-6; ///< floor = scale * sample var of residuals
};

struct RegressionResult {
    Eigen::VectorXd beta;       ///< FGLS coefficients
    Eigen::VectorXd hac_se;
    Eigen::VectorXd p_values;   ///< two-sided, normal reference
    Eigen::VectorXd beta_ols;   ///< step-1 coefficients
    Eigen::VectorXd gamma_aux;  ///< auxiliary (variance) regression coefficients
    Eigen::VectorXd omega_diag; ///< fitted variances after flooring
    Eigen::VectorXd residuals;  ///< unweighted FGLS residuals y - X beta
    Eigen::MatrixXd hac_cov;
    double r2 = 0;              ///< weighted R^2
    double adj_r2 = 0;
    double f_stat = 0;
    double f_p = 0;
    double wald_stat = 0;       ///< joint slope test on the HAC covariance
    double wald_p = 0;
    double condition_number = 0;
    std::vector<double> vif;    ///< per design column (intercept included)
    int n_floored = 0;          ///< Omega entries raised to the floor
    int hac_bandwidth_used = 0;
    bool degenerate_weights = false; ///< every fitted variance hit the floor
};

/// Two-step feasible GLS: OLS, auxiliary regression of squared residuals on
/// the same design, WLS with the floored fitted variances, Newey-West
/// inference on the weighted regression.
RegressionResult fit_fgls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const FglsOptions& options = {});

/// VIF_k = 1/(1 - R^2_k) from regressing column k on the remaining columns.
/// Perfect collinearity raises EstimationError.
std::vector<double> variance_inflation_factors(const Eigen::MatrixXd& X);

/// Singular-value condition number.
double condition_number(const Eigen::MatrixXd& X);

} // namespace optbench

#include "optbench/regression.hpp"

#include "optbench/errors.hpp"
#include "optbench/stats.hpp"

#include <cmath>

namespace optbench {

double condition_number(const Eigen::MatrixXd& X) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) <= 0)
        return std::numeric_limits<double>::infinity();
    return sv(0) / sv(sv.size() - 1);
}

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size()) throw DataError("ols: design/response length mismatch");
    if (X.rows() <= X.cols()) throw DataError("ols: more columns than observations");
    OlsFit fit;
    fit.condition_number = condition_number(X);
    if (!(fit.condition_number < 1e8))
        throw EstimationError("ols: singular or near-singular design (condition number " +
                              std::to_string(fit.condition_number) + ")");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    fit.beta = qr.solve(y);
    fit.fitted = X * fit.beta;
    fit.residuals = y - fit.fitted;
    const double tss = (y.array() - y.mean()).matrix().squaredNorm();
    fit.r2 = tss > 0 ? 1.0 - fit.residuals.squaredNorm() / tss : 0.0;
    return fit;
}

int newey_west_auto_bandwidth(std::size_t n) {
    return static_cast<int>(
        std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

Eigen::MatrixXd newey_west_cov(const Eigen::MatrixXd& X, const Eigen::VectorXd& u,
                               int L) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (L < 0) throw DataError("newey_west_cov: bandwidth must be >= 0");
    if (static_cast<Eigen::Index>(L) >= n)
        throw DataError("newey_west_cov: bandwidth must be below the sample size");
    if (u.size() != n) throw DataError("newey_west_cov: residual length mismatch");

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index t = 0; t < n; ++t)
        S += u(t) * u(t) * X.row(t).transpose() * X.row(t);
    for (int l = 1; l <= L; ++l) {
        const double w = 1.0 - static_cast<double>(l) / (static_cast<double>(L) + 1.0);
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index t = l; t < n; ++t)
            G += u(t) * u(t - l) * X.row(t).transpose() * X.row(t - l);
        S += w * (G + G.transpose());
    }
    const Eigen::MatrixXd xtx_inv =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    return xtx_inv * S * xtx_inv;
}

std::vector<double> variance_inflation_factors(const Eigen::MatrixXd& X) {
    const Eigen::Index k = X.cols();
    std::vector<double> vif(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::MatrixXd others(X.rows(), k - 1);
        Eigen::Index c = 0;
        for (Eigen::Index m = 0; m < k; ++m)
            if (m != j) others.col(c++) = X.col(m);
        const Eigen::VectorXd target = X.col(j);
        const Eigen::VectorXd beta = others.colPivHouseholderQr().solve(target);
        const Eigen::VectorXd resid = target - others * beta;
        const double tss = (target.array() - target.mean()).matrix().squaredNorm();
        double r2;
        if (tss > 0) {
            r2 = 1.0 - resid.squaredNorm() / tss;
        } else {
            // A constant column (the intercept): uncentered R^2.
            const double utss = target.squaredNorm();
            r2 = utss > 0 ? 1.0 - resid.squaredNorm() / utss : 0.0;
        }
        if (r2 > 1.0 - 1e-12)
            throw EstimationError("variance_inflation_factors: column " +
                                  std::to_string(j) + " is perfectly collinear");
        vif[j] = 1.0 / (1.0 - r2);
    }
    return vif;
}

RegressionResult fit_fgls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const FglsOptions& options) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    RegressionResult out;

    // Step 1: OLS baseline.
    const OlsFit step1 = ols(X, y);
    out.beta_ols = step1.beta;

    // Step 2: auxiliary regression of squared residuals on the same design.
    Eigen::VectorXd e2(n);
    for (Eigen::Index i = 0; i < n; ++i) e2(i) = step1.residuals(i) * step1.residuals(i);
    const OlsFit aux = ols(X, e2);
    out.gamma_aux = aux.beta;

    const double resid_var =
        step1.residuals.squaredNorm() / std::max<Eigen::Index>(1, n - k);
    const double floor = std::max(options.variance_floor_scale * resid_var, 1e-300);
    out.omega_diag.resize(n);
    out.n_floored = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double w = options.force_constant_omega ? resid_var : aux.fitted(i);
        if (!(w > floor)) {
            w = floor;
            if (!options.force_constant_omega) ++out.n_floored;
        }
        out.omega_diag(i) = w;
    }
    out.degenerate_weights = !options.force_constant_omega && out.n_floored == n;

    // Step 3: weighted least squares with weights 1/omega.
    Eigen::MatrixXd Xw(n, k);
    Eigen::VectorXd yw(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = 1.0 / std::sqrt(out.omega_diag(i));
        Xw.row(i) = X.row(i) * s;
        yw(i) = y(i) * s;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
    if (qr.rank() < k)
        throw EstimationError("fit_fgls: singular weighted design");
    out.beta = qr.solve(yw);
    out.residuals = y - X * out.beta;

    // HAC inference on the weighted regression.
    const Eigen::VectorXd uw = yw - Xw * out.beta;
    out.hac_bandwidth_used = options.hac_bandwidth >= 0
                                 ? options.hac_bandwidth
                                 : newey_west_auto_bandwidth(static_cast<std::size_t>(n));
    out.hac_cov = newey_west_cov(Xw, uw, out.hac_bandwidth_used);
    out.hac_se.resize(k);
    out.p_values.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        out.hac_se(j) = std::sqrt(std::max(out.hac_cov(j, j), 0.0));
        out.p_values(j) =
            out.hac_se(j) > 0 ? normal_two_sided_p(out.beta(j) / out.hac_se(j)) : 0.0;
    }

    // Goodness of fit on the weighted regression.
    const double wmean = yw.mean();
    const double tss = (yw.array() - wmean).matrix().squaredNorm();
    const double rss = uw.squaredNorm();
    out.r2 = tss > 0 ? 1.0 - rss / tss : 0.0;
    const double dof = static_cast<double>(n - k);
    out.adj_r2 = 1.0 - (1.0 - out.r2) * static_cast<double>(n - 1) / dof;
    const double slopes = static_cast<double>(k - 1);
    if (slopes > 0 && rss > 0) {
        out.f_stat = ((tss - rss) / slopes) / (rss / dof);
        out.f_p = f_dist_sf(out.f_stat, slopes, dof);
        // Wald: all slope coefficients jointly zero, HAC covariance.
        const Eigen::VectorXd b = out.beta.tail(k - 1);
        const Eigen::MatrixXd V = out.hac_cov.bottomRightCorner(k - 1, k - 1);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(V);
        if (ldlt.info() == Eigen::Success) {
            out.wald_stat = b.dot(ldlt.solve(b));
            out.wald_p = chi_square_sf(out.wald_stat, slopes);
        }
    }

    out.condition_number = step1.condition_number;
    out.vif = variance_inflation_factors(X);
    return out;
}

} // namespace optbench

#include <doctest.h>

#include "optbench/errors.hpp"
#include "optbench/regression.hpp"
#include "optbench/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace optbench;

namespace {

Eigen::MatrixXd random_design(std::mt19937_64& rng, int n, int k) {
    std::normal_distribution<double> noise(0.0, 1.0);
    Eigen::MatrixXd X(n, k);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (int j = 1; j < k; ++j) X(i, j) = noise(rng);
    }
    return X;
}

} // namespace

TEST_CASE("ols equals the normal-equation solution") {
    auto rng = substream(61, "reg-ols");
    std::normal_distribution<double> noise(0.0, 1.0);
    const Eigen::MatrixXd X = random_design(rng, 200, 4);
    Eigen::VectorXd y(200);
    for (int i = 0; i < 200; ++i)
        y(i) = 2.0 + 0.5 * X(i, 1) - 1.5 * X(i, 2) + noise(rng);

    const OlsFit fit = ols(X, y);
    const Eigen::VectorXd ref = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    CHECK((fit.beta - ref).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((fit.fitted + fit.residuals - y).lpNorm<Eigen::Infinity>() < 1e-10);
    // residuals orthogonal to the design
    CHECK((X.transpose() * fit.residuals).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("ols rejects collinear designs") {
    auto rng = substream(62, "reg-collinear");
    Eigen::MatrixXd X = random_design(rng, 100, 3);
    X.col(2) = 2.0 * X.col(1); // exact collinearity
    const Eigen::VectorXd y = Eigen::VectorXd::Ones(100);
    CHECK_THROWS_AS(ols(X, y), EstimationError);
}

TEST_CASE("newey-west with zero bandwidth equals the White estimator") {
    auto rng = substream(63, "reg-white");
    std::normal_distribution<double> noise(0.0, 1.0);
    const int n = 150, k = 3;
    const Eigen::MatrixXd X = random_design(rng, n, k);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i)
        y(i) = 1.0 + X(i, 1) + (1 + 0.5 * std::abs(X(i, 2))) * noise(rng);
    const OlsFit fit = ols(X, y);

    const Eigen::MatrixXd nw = newey_west_cov(X, fit.residuals, 0);

    // White sandwich written out directly
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd xi = X.row(i).transpose();
        meat += fit.residuals(i) * fit.residuals(i) * xi * xi.transpose();
    }
    const Eigen::MatrixXd bread = (X.transpose() * X).inverse();
    const Eigen::MatrixXd white = bread * meat * bread;
    CHECK((nw - white).lpNorm<Eigen::Infinity>() <
          1e-12 * white.lpNorm<Eigen::Infinity>());
}

TEST_CASE("newey-west automatic bandwidth rule") {
    CHECK(newey_west_auto_bandwidth(100) == 4);
    CHECK(newey_west_auto_bandwidth(320) == 5); // floor(4 * 3.2^(2/9))
    CHECK(newey_west_auto_bandwidth(50) == 3);
}

TEST_CASE("hac covariance is symmetric positive semidefinite") {
    auto rng = substream(64, "reg-psd");
    std::normal_distribution<double> noise(0.0, 1.0);
    const int n = 200;
    const Eigen::MatrixXd X = random_design(rng, n, 4);
    Eigen::VectorXd e(n);
    e(0) = noise(rng);
    for (int i = 1; i < n; ++i) e(i) = 0.6 * e(i - 1) + noise(rng); // serial dependence
    const Eigen::MatrixXd nw = newey_west_cov(X, e, 6);
    CHECK((nw - nw.transpose()).lpNorm<Eigen::Infinity>() < 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(nw);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * nw.trace());
}

TEST_CASE("constant-weight fgls collapses to ols") {
    auto rng = substream(65, "reg-collapse");
    std::normal_distribution<double> noise(0.0, 1.0);
    const int n = 180;
    const Eigen::MatrixXd X = random_design(rng, n, 4);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = 0.3 - X(i, 1) + 2 * X(i, 3) + noise(rng);

    FglsOptions opts;
    opts.force_constant_omega = true;
    const RegressionResult res = fit_fgls(X, y, opts);
    const OlsFit ref = ols(X, y);
    CHECK((res.beta - ref.beta).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("fgls: weighted orthogonality, floors logged, r2 ordering") {
    auto rng = substream(66, "reg-fgls");
    std::normal_distribution<double> noise(0.0, 1.0);
    const int n = 400;
    const Eigen::MatrixXd X = random_design(rng, n, 4);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const double sd = std::exp(0.4 * X(i, 1)); // heteroskedastic in column 1
        y(i) = 1.0 + 0.8 * X(i, 1) - 0.5 * X(i, 2) + sd * noise(rng);
    }
    const RegressionResult res = fit_fgls(X, y);

    // weighted residuals orthogonal to the weighted design
    Eigen::MatrixXd Xw = X;
    Eigen::VectorXd ew = y - X * res.beta;
    for (int i = 0; i < n; ++i) {
        const double w = 1.0 / std::sqrt(res.omega_diag(i));
        Xw.row(i) *= w;
        ew(i) *= w;
    }
    CHECK((Xw.transpose() * ew).lpNorm<Eigen::Infinity>() < 1e-8 * n);

    CHECK(res.omega_diag.minCoeff() > 0);
    CHECK(res.adj_r2 <= res.r2);
    CHECK(res.n_floored >= 0);
    CHECK(res.hac_bandwidth_used == newey_west_auto_bandwidth(n));
    CHECK(res.p_values.size() == res.beta.size());
    for (Eigen::Index j = 0; j < res.p_values.size(); ++j) {
        CHECK(res.p_values(j) >= 0);
        CHECK(res.p_values(j) <= 1);
    }
    // strong true slopes should be detected
    CHECK(res.p_values(1) < 1e-3);
    CHECK(res.p_values(2) < 1e-3);
    CHECK(res.wald_p < 1e-10);
    CHECK(res.f_p < 1e-10);
}

TEST_CASE("vif is one on an orthogonal design and explodes near collinearity") {
    const int n = 64;
    Eigen::MatrixXd X(n, 3);
    // orthogonal columns: intercept plus two sign patterns
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = (i % 2 == 0) ? 1.0 : -1.0;
        X(i, 2) = (i % 4 < 2) ? 1.0 : -1.0;
    }
    const auto vif = variance_inflation_factors(X);
    REQUIRE(vif.size() == 3);
    CHECK(vif[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(vif[2] == doctest::Approx(1.0).epsilon(1e-10));

    auto rng = substream(67, "reg-vif");
    std::normal_distribution<double> noise(0.0, 1.0);
    Eigen::MatrixXd Z(200, 3);
    for (int i = 0; i < 200; ++i) {
        Z(i, 0) = 1.0;
        Z(i, 1) = noise(rng);
        Z(i, 2) = Z(i, 1) + 0.01 * noise(rng); // nearly duplicated column
    }
    const auto vif2 = variance_inflation_factors(Z);
    CHECK(vif2[1] > 100.0);
    CHECK(vif2[2] > 100.0);
}

TEST_CASE("condition number matches the singular-value ratio") {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(6, 3);
    D(0, 0) = 8.0;
    D(1, 1) = 2.0;
    D(2, 2) = 0.5;
    CHECK(condition_number(D) == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("fgls is more efficient than ols under heteroskedasticity") {
    auto rng = substream(68, "reg-efficiency");
    std::normal_distribution<double> noise(0.0, 1.0);
    const int n = 250, reps = 120;
    double se2_ols = 0, se2_fgls = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const Eigen::MatrixXd X = random_design(rng, n, 3);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            const double sd = std::exp(0.8 * X(i, 1));
            y(i) = 1.0 + 0.5 * X(i, 1) + sd * noise(rng);
        }
        const OlsFit o = ols(X, y);
        const RegressionResult g = fit_fgls(X, y);
        se2_ols += (o.beta(1) - 0.5) * (o.beta(1) - 0.5);
        se2_fgls += (g.beta(1) - 0.5) * (g.beta(1) - 0.5);
    }
    CHECK(se2_fgls < se2_ols);
}

// Acceptance harness: ten numbered criteria, one PASS/FAIL line each.
// Every tolerance is pinned in this file; the process exits nonzero when
// any criterion fails. Criterion 9 drives the installed CLI binary
// (OPTBENCH_CLI_PATH) end to end on the bundled synthetic fixture.

#include "optbench/amm.hpp"
#include "optbench/errors.hpp"
#include "optbench/garch.hpp"
#include "optbench/market_data.hpp"
#include "optbench/mispricing.hpp"
#include "optbench/pipeline.hpp"
#include "optbench/pricing.hpp"
#include "optbench/regime.hpp"
#include "optbench/regression.hpp"
#include "optbench/rng.hpp"
#include "optbench/sim.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace optbench;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

void run_criterion(int n, const std::function<void(int)>& body) {
    try {
        body(n);
    } catch (const std::exception& e) {
        report(n, false, std::string("unexpected exception: ") + e.what());
    }
}

std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// criterion 1: filter/smoother vs exhaustive path enumeration

struct PathOracle {
    double loglik = 0;
    std::vector<std::array<double, 2>> smoothed;
};

PathOracle enumerate_paths(const MsArParams& p, const std::vector<double>& y,
                           int a) {
    const int n = static_cast<int>(y.size()) - a;
    const auto init = p.stationary_distribution();
    const double trans[2][2] = {{p.p00, 1 - p.p00}, {1 - p.p11, p.p11}};
    double total = 0;
    std::vector<std::array<double, 2>> marg(n, {0.0, 0.0});
    for (std::uint64_t path = 0; path < (1ull << n); ++path) {
        double w = 0;
        int prev = -1;
        for (int t = 0; t < n; ++t) {
            const int s = (path >> t) & 1;
            w += std::log(t == 0 ? init[s] : trans[prev][s]);
            double mean = p.mu[s];
            for (int i = 0; i < a; ++i) mean += p.phi[s][i] * y[a + t - 1 - i];
            const double e = y[a + t] - mean;
            w += -0.5 * std::log(2 * M_PI * p.sigma2[s]) - 0.5 * e * e / p.sigma2[s];
            prev = s;
        }
        const double pw = std::exp(w);
        total += pw;
        for (int t = 0; t < n; ++t) marg[t][(path >> t) & 1] += pw;
    }
    PathOracle out;
    out.loglik = std::log(total);
    out.smoothed = marg;
    for (auto& m : out.smoothed) {
        m[0] /= total;
        m[1] /= total;
    }
    return out;
}

void criterion1(int n) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rng = substream(101, "accept-filter-oracle");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.5);
    double worst = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const int a = 1;
        MsArParams p;
        p.mu = {u(rng) * 2 - 1, u(rng) * 2 - 1};
        p.phi = {std::vector<double>{(u(rng) * 2 - 1) * 0.6},
                 std::vector<double>{(u(rng) * 2 - 1) * 0.6}};
        p.sigma2 = {0.2 + 2 * u(rng), 0.2 + 2 * u(rng)};
        p.p00 = 0.05 + 0.9 * u(rng);
        p.p11 = 0.05 + 0.9 * u(rng);
        std::vector<double> y(12 + a);
        for (double& v : y) v = noise(rng);

        const PathOracle oracle = enumerate_paths(p, y, a);
        const HamiltonFilterResult filt = hamilton_filter(p, y, a);
        const auto smoothed = kim_smooth(p, filt);
        worst = std::max(worst, std::abs(filt.loglik - oracle.loglik));
        for (std::size_t t = 0; t < smoothed.size(); ++t)
            for (int s = 0; s < 2; ++s)
                worst = std::max(worst,
                                 std::abs(smoothed[t][s] - oracle.smoothed[t][s]));
    }
    const double secs = elapsed_s(t0);
    const bool ok = worst < 1e-8 && secs < 5.0;
    report(n, ok,
           "filter/smoother vs 2^12 path enumeration on 50 parameterizations: "
           "max |diff| = " + fmt2(worst) + " (tol 1e-8), " + fmt2(secs) +
           " s (limit 5 s)");
}

// ---------------------------------------------------------------------------
// criterion 2: MS-AR parameter recovery

void criterion2(int n) {
    const auto t0 = std::chrono::steady_clock::now();
    MsArParams truth;
    truth.mu = {0.1, -0.2};
    truth.phi = {std::vector<double>{0.25}, std::vector<double>{-0.1}};
    truth.sigma2 = {1.0, 25.0};
    truth.p00 = 0.95;
    truth.p11 = 0.95;

    int ok_count = 0;
    for (int seed = 0; seed < 20; ++seed) {
        auto rng = substream(7000 + seed, "accept-msar-recovery");
        const auto sim = simulate_msar(truth, 4000, rng);
        ReturnSeries series;
        series.asset = "sim";
        series.obs.resize(sim.returns.size());
        for (std::size_t t = 0; t < sim.returns.size(); ++t)
            series.obs[t] = {static_cast<Date>(t), sim.returns[t], 0.0};

        MsArFitOptions opts;
        opts.starts = 6;
        opts.compute_std_errors = false;
        const MsArFit fit = fit_msar(series, MsArSpec{1}, 900 + seed, opts);

        // align on variance order; swap transition probs with the labels
        const bool swapped = fit.params.sigma2[0] > fit.params.sigma2[1];
        const double s2_lo = swapped ? fit.params.sigma2[1] : fit.params.sigma2[0];
        const double s2_hi = swapped ? fit.params.sigma2[0] : fit.params.sigma2[1];
        const double p_lo = swapped ? fit.params.p11 : fit.params.p00;
        const double p_hi = swapped ? fit.params.p00 : fit.params.p11;
        const bool good = std::abs(s2_lo - 1.0) / 1.0 < 0.15 &&
                          std::abs(s2_hi - 25.0) / 25.0 < 0.15 &&
                          std::abs(p_lo - 0.95) < 0.05 &&
                          std::abs(p_hi - 0.95) < 0.05;
        if (good) ++ok_count;
    }
    const double secs = elapsed_s(t0);
    const bool ok = ok_count >= 18 && secs < 120.0;
    report(n, ok,
           "MS-AR(1) recovery (sigma^2 1 vs 25, p=0.95, T=4000): " +
           std::to_string(ok_count) +
           "/20 seeds within 15% rel variance and 0.05 abs transition "
           "tolerance (need >= 18), " + fmt2(secs) + " s (limit 120 s)");
}

// ---------------------------------------------------------------------------
// criterion 3: GARCH(1,1) recovery and BIC order selection

void criterion3(int n) {
    const auto t0 = std::chrono::steady_clock::now();
    GarchParams truth;
    truth.mu = 0.0;
    truth.omega = 0.1;
    truth.alpha = {0.05};
    truth.beta = {0.9};
    truth.eta = 8.0;
    truth.lambda = 0.0;
    const GarchSpec true_spec{1, 0, 1};

    int recovered = 0;
    int bic_plain = 0;
    for (int seed = 0; seed < 20; ++seed) {
        auto rng = substream(5000 + seed, "accept-garch-recovery");
        const auto path = simulate_garch(truth, true_spec, 5000, rng);
        ReturnSeries series;
        series.asset = "sim";
        series.obs.resize(path.size());
        for (std::size_t t = 0; t < path.size(); ++t)
            series.obs[t] = {static_cast<Date>(t), path[t], 0.0};

        GarchFitOptions opts;
        opts.restarts = 1;
        const GarchFit fit = fit_garch(series, true_spec, 300 + seed, opts);
        // std_errors pack [mu, omega, alpha, beta, eta, lambda] for (1,0,1)
        const bool within =
            fit.converged &&
            std::abs(fit.params.omega - truth.omega) <= 3 * fit.std_errors[1] &&
            std::abs(fit.params.alpha[0] - truth.alpha[0]) <= 3 * fit.std_errors[2] &&
            std::abs(fit.params.beta[0] - truth.beta[0]) <= 3 * fit.std_errors[3];
        if (within) ++recovered;

        GarchFitOptions sel_opts;
        sel_opts.restarts = 1;
        sel_opts.compute_std_errors = false;
        const BicSelection sel =
            select_by_bic(series, 300 + seed, GarchGrid{2, 1, 2}, sel_opts);
        if (sel.spec.o == 0) ++bic_plain;
    }
    const double secs = elapsed_s(t0);
    const bool ok = recovered >= 18 && bic_plain >= 18 && secs < 300.0;
    report(n, ok,
           "GARCH(1,1) recovery (omega=0.1, alpha=0.05, beta=0.9, T=5000): " +
           std::to_string(recovered) + "/20 within 3 SE, BIC picked o=0 in " +
           std::to_string(bic_plain) + "/20 (need >= 18 each), " + fmt2(secs) +
           " s (limit 300 s)");
}

// ---------------------------------------------------------------------------
// criterion 4: skewed-t density correctness

template <typename F>
double simpson_q(F f, double lo, double hi, int panels) {
    double acc = f(lo) + f(hi);
    const double h = (hi - lo) / panels;
    for (int i = 1; i < panels; ++i)
        acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// sinh-sinh substitution so the power-law tails decay double-exponentially
template <typename F>
double tail_integral(F g) {
    auto h = [&](double u) {
        const double z = std::sinh(2.0 * std::sinh(u));
        const double dz = 2.0 * std::cosh(2.0 * std::sinh(u)) * std::cosh(u);
        return g(z) * dz;
    };
    return simpson_q(h, -5.0, 5.0, 200000);
}

double student_t_std_pdf(double z, double eta) {
    const double c = std::exp(std::lgamma((eta + 1) / 2) - std::lgamma(eta / 2)) /
                     std::sqrt(M_PI * (eta - 2));
    return c * std::pow(1 + z * z / (eta - 2), -(eta + 1) / 2);
}

void criterion4(int n) {
    double worst_mass = 0, worst_var = 0, worst_pt = 0;
    for (double eta : {2.5, 4.0, 10.0}) {
        for (double lambda : {-0.5, 0.0, 0.5}) {
            auto f = [&](double z) { return skewed_t_pdf(z, eta, lambda); };
            worst_mass = std::max(worst_mass, std::abs(tail_integral(f) - 1.0));
            worst_var = std::max(
                worst_var,
                std::abs(tail_integral([&](double z) { return z * z * f(z); }) -
                         1.0));
        }
        for (double z = -8.0; z <= 8.0; z += 0.05)
            worst_pt = std::max(worst_pt, std::abs(skewed_t_pdf(z, eta, 0.0) -
                                                   student_t_std_pdf(z, eta)));
    }
    const bool ok = worst_mass < 1e-6 && worst_var < 1e-4 && worst_pt < 1e-10;
    report(n, ok,
           "skewed-t over {2.5,4,10}x{-0.5,0,0.5}: |mass-1| = " + fmt2(worst_mass) +
           " (tol 1e-6), |var-1| = " + fmt2(worst_var) +
           " (tol 1e-4), lambda=0 vs Student-t = " + fmt2(worst_pt) +
           " (tol 1e-10)");
}

// ---------------------------------------------------------------------------
// criterion 5: pricing identities, implied-vol round trip, quadrature oracle

double quadrature_price(const PricingInput& in, OptionKind kind) {
    const double sqt = in.sigma * std::sqrt(in.maturity);
    const double drift = (in.rate - 0.5 * in.sigma * in.sigma) * in.maturity;
    auto payoff = [&](double z) {
        const double st = in.spot * std::exp(drift + sqt * z);
        return kind == OptionKind::Call ? std::max(st - in.strike, 0.0)
                                        : std::max(in.strike - st, 0.0);
    };
    auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI); };
    auto integrand = [&](double z) { return payoff(z) * phi(z); };
    const double zstar =
        std::clamp((std::log(in.strike / in.spot) - drift) / sqt, -12.0, 12.0);
    const double integral = simpson_q(integrand, -12.0, zstar, 40000) +
                            simpson_q(integrand, zstar, 12.0, 40000);
    return std::exp(-in.rate * in.maturity) * integral;
}

void criterion5(int n) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rng = substream(55, "accept-pricing");
    std::uniform_real_distribution<double> u(0.0, 1.0);

    double worst_parity = 0;
    double worst_rt = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        PricingInput in;
        in.spot = 10 + 490 * u(rng);
        in.rate = 0.08 * u(rng);
        in.maturity = (7 + 83 * u(rng)) / 365.0;
        in.sigma = 0.1 + 1.4 * u(rng);
        // strikes stay on the quoted ATM/OTM side, where sigma is identified
        const OptionKind kind = u(rng) < 0.5 ? OptionKind::Call : OptionKind::Put;
        in.strike = kind == OptionKind::Call ? in.spot * (1.0 + 0.3 * u(rng))
                                             : in.spot * (1.0 - 0.3 * u(rng));
        worst_parity = std::max(worst_parity, std::abs(put_call_parity_gap(in)));
        const double premium = bs_price(in, kind);
        PricingInput no_sigma = in;
        no_sigma.sigma = 0;
        worst_rt = std::max(worst_rt,
                            std::abs(implied_vol(premium, no_sigma, kind) - in.sigma));
    }

    double worst_limit = 0;
    {
        PricingInput in{100.0, 90.0, 0.03, 30.0 / 365.0, 1e-13};
        worst_limit = std::abs(bs_price(in, OptionKind::Call) -
                               (in.spot - in.strike * std::exp(-in.rate * in.maturity)));
        PricingInput k0{100.0, 1e-12, 0.03, 30.0 / 365.0, 0.8};
        worst_limit =
            std::max(worst_limit, std::abs(bs_price(k0, OptionKind::Call) - k0.spot));
    }

    double worst_quad = 0;
    for (int rep = 0; rep < 100; ++rep) {
        PricingInput in;
        in.spot = 50 + 45000 * u(rng);
        in.strike = in.spot * (0.6 + 0.8 * u(rng));
        in.rate = 0.08 * u(rng);
        in.maturity = (7 + 83 * u(rng)) / 365.0;
        in.sigma = 0.1 + 1.4 * u(rng);
        for (OptionKind kind : {OptionKind::Call, OptionKind::Put}) {
            const double oracle = quadrature_price(in, kind);
            worst_quad = std::max(worst_quad, std::abs(bs_price(in, kind) - oracle) /
                                                  std::max(1.0, oracle));
        }
    }
    const double secs = elapsed_s(t0);
    const bool ok = worst_parity < 1e-10 && worst_rt < 1e-6 &&
                    worst_limit < 1e-10 && worst_quad < 1e-6 && secs < 10.0;
    report(n, ok,
           "pricing: parity " + fmt2(worst_parity) + " (tol 1e-10), IV round-trip " +
           fmt2(worst_rt) + " (tol 1e-6) on 1000 inputs, limits " +
           fmt2(worst_limit) + " (tol 1e-10), quadrature " + fmt2(worst_quad) +
           " (tol 1e-6) on 100 inputs, " + fmt2(secs) + " s (limit 10 s)");
}

// ---------------------------------------------------------------------------
// criterion 6: quoting-rule identities and grid validation

void criterion6(int n) {
    RateTable table;
    for (OptionKind kind : {OptionKind::Call, OptionKind::Put}) {
        const auto& steps = kind == OptionKind::Call ? StrikeGrid::call_steps()
                                                     : StrikeGrid::put_steps();
        for (int step : steps)
            for (int mat : {7, 30, 90})
                table.set(kind, step, mat,
                          0.01 + 0.0004 * step + 0.0001 * mat +
                              (kind == OptionKind::Put ? 0.002 : 0.0));
    }

    bool fee_exact = true;
    double worst_rate = 0;
    for (OptionKind kind : {OptionKind::Call, OptionKind::Put}) {
        const auto& steps = kind == OptionKind::Call ? StrikeGrid::call_steps()
                                                     : StrikeGrid::put_steps();
        for (int step : steps) {
            for (int mat : {7, 19, 30, 61, 90}) {
                const double spot = 137.25;
                const double amount = 2.75;
                const QuoteResult q = quote(table, spot, kind, step, mat, amount);
                const double rs = step == 100 ? 0.01 : 0.005;
                if (q.settlement_fee != amount * q.premium_per_contract * rs)
                    fee_exact = false;
                if (q.total_cost != amount * q.premium_per_contract + q.settlement_fee)
                    fee_exact = false;

                OptionTrade t;
                t.kind = kind;
                t.type = step == 100 ? MoneynessType::ATM : MoneynessType::OTM;
                t.spot_at_trade = spot;
                t.strike = spot * step / 100.0;
                t.maturity_days = mat;
                t.amount = amount;
                t.premium_paid = amount * q.premium_per_contract;
                const double v = table.rate(kind, step, mat);
                worst_rate =
                    std::max(worst_rate, std::abs(implied_rate(t).rate - v));
            }
        }
    }

    auto rng = substream(66, "accept-grid-fuzz");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int rejected = 0;
    const int fuzz_n = 500;
    for (int rep = 0; rep < fuzz_n; ++rep) {
        OptionTrade t;
        const bool call = u(rng) < 0.5;
        t.kind = call ? OptionKind::Call : OptionKind::Put;
        t.type = MoneynessType::OTM;
        t.spot_at_trade = 50 + 200 * u(rng);
        // strictly in-the-money ratios, clear of the 1e-3 matching band
        const double ratio = call ? 0.5 + 0.49 * u(rng) : 1.01 + 0.5 * u(rng);
        t.strike = t.spot_at_trade * ratio;
        t.maturity_days = 7 + static_cast<int>(83 * u(rng));
        t.amount = 1;
        t.premium_paid = 1;
        try {
            validate_trade_against_grid(t);
        } catch (const DataError&) {
            ++rejected;
        }
    }
    const bool ok = fee_exact && worst_rate < 1e-12 && rejected == fuzz_n;
    report(n, ok,
           "quote rule: fee ratios exact (" + std::string(fee_exact ? "yes" : "NO") +
           "), quote<->implied rate round-trip " + fmt2(worst_rate) +
           " (tol 1e-12), grid rejected " + std::to_string(rejected) + "/" +
           std::to_string(fuzz_n) + " in-the-money fuzz trades");
}

// ---------------------------------------------------------------------------
// criterion 7: FGLS / HAC inference properties

void criterion7(int n) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rng = substream(77, "accept-fgls");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    // constant-Omega collapse to OLS
    const int nn = 200;
    Eigen::MatrixXd X(nn, 4);
    Eigen::VectorXd y(nn);
    for (int i = 0; i < nn; ++i) {
        X(i, 0) = 1;
        for (int j = 1; j < 4; ++j) X(i, j) = gauss(rng);
        y(i) = 0.5 + X(i, 1) - 2 * X(i, 2) + 0.3 * X(i, 3) + gauss(rng);
    }
    FglsOptions const_opts;
    const_opts.force_constant_omega = true;
    const double collapse_gap =
        (fit_fgls(X, y, const_opts).beta - ols(X, y).beta).lpNorm<Eigen::Infinity>();

    // Newey-West L = 0 equals the White sandwich
    const Eigen::VectorXd resid = ols(X, y).residuals;
    const Eigen::MatrixXd nw0 = newey_west_cov(X, resid, 0);
    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < nn; ++i) {
        const Eigen::VectorXd xi = X.row(i).transpose();
        meat += resid(i) * resid(i) * xi * xi.transpose();
    }
    const double white_gap =
        (nw0 - xtx_inv * meat * xtx_inv).lpNorm<Eigen::Infinity>();

    // 95% coverage under i.i.d. errors
    int covered = 0;
    const int cov_reps = 1000;
    const int cov_n = 500;
    for (int rep = 0; rep < cov_reps; ++rep) {
        Eigen::MatrixXd Xc(cov_n, 2);
        Eigen::VectorXd yc(cov_n);
        for (int i = 0; i < cov_n; ++i) {
            Xc(i, 0) = 1;
            Xc(i, 1) = gauss(rng);
            yc(i) = 1.0 + 0.5 * Xc(i, 1) + gauss(rng);
        }
        const RegressionResult r = fit_fgls(Xc, yc);
        if (std::abs(r.beta(1) - 0.5) <= 1.959963984540054 * r.hac_se(1)) ++covered;
    }
    const double coverage = static_cast<double>(covered) / cov_reps;

    // FGLS efficiency dominance under known-form heteroskedasticity
    const int eff_reps = 500;
    const int eff_n = 600;
    std::vector<double> fgls_b, ols_b;
    fgls_b.reserve(eff_reps);
    ols_b.reserve(eff_reps);
    for (int rep = 0; rep < eff_reps; ++rep) {
        Eigen::MatrixXd Xe(eff_n, 2);
        Eigen::VectorXd ye(eff_n);
        for (int i = 0; i < eff_n; ++i) {
            Xe(i, 0) = 1;
            Xe(i, 1) = u(rng);
            // variance linear in the regressor (matching the auxiliary
            // specification) with a large intercept, so the fitted variances
            // stay positive and the floor never engages
            const double sd = std::sqrt(5.0 + 10.0 * Xe(i, 1));
            ye(i) = 1.0 + 0.5 * Xe(i, 1) + sd * gauss(rng);
        }
        fgls_b.push_back(fit_fgls(Xe, ye).beta(1));
        ols_b.push_back(ols(Xe, ye).beta(1));
    }
    auto sample_var = [](const std::vector<double>& v) {
        double m = 0;
        for (double x : v) m += x;
        m /= v.size();
        double s = 0;
        for (double x : v) s += (x - m) * (x - m);
        return s / (v.size() - 1);
    };
    const double var_fgls = sample_var(fgls_b);
    const double var_ols = sample_var(ols_b);

    const double secs = elapsed_s(t0);
    const bool ok = collapse_gap < 1e-10 && white_gap < 1e-12 &&
                    coverage >= 0.93 && coverage <= 0.97 && var_fgls < var_ols &&
                    secs < 180.0;
    report(n, ok,
           "FGLS/HAC: constant-Omega vs OLS " + fmt2(collapse_gap) +
           " (tol 1e-10), NW(0) vs White " + fmt2(white_gap) +
           " (tol 1e-12), coverage " + fmt2(coverage) +
           " (need [0.93, 0.97] over 1000 reps), FGLS var " + fmt2(var_fgls) +
           " vs OLS var " + fmt2(var_ols) + " over 500 reps, " + fmt2(secs) +
           " s (limit 180 s)");
}

// ---------------------------------------------------------------------------
// criterion 8: mispricing identities, standardization, VIF

void criterion8(int n) {
    auto rng = substream(88, "accept-mispricing");
    std::uniform_real_distribution<double> u(0.0, 1.0);

    const Date d0 = parse_date("2022-03-01");
    const int days = 60;
    VolatilityPath vp;
    ReturnSeries returns;
    returns.asset = "synth";
    for (int d = 0; d < days; ++d) {
        vp.points.push_back({d0 + d, 0.55 + 0.015 * (d % 9), d % 2});
        returns.obs.push_back({d0 + d, 4 * u(rng) - 2, 1e6 * (1 + u(rng))});
    }

    std::vector<OptionTrade> trades;
    for (int i = 0; i < 120; ++i) {
        OptionTrade t;
        t.trade_id = "A" + std::to_string(i);
        t.underlying = "synth";
        const bool call = u(rng) < 0.5;
        t.kind = call ? OptionKind::Call : OptionKind::Put;
        const int step = 100 + 10 * (i % 4);
        t.type = step == 100 ? MoneynessType::ATM : MoneynessType::OTM;
        t.spot_at_trade = 90 + 40 * u(rng);
        t.strike = t.spot_at_trade * (call ? step : 200 - step) / 100.0;
        t.maturity_days = 7 + static_cast<int>(83 * u(rng));
        t.amount = 0.1 + 5 * u(rng);
        const int day = i % days;
        t.trade_date = d0 + day;
        t.timestamp = format_date(t.trade_date) + "T12:00:00Z";
        t.premium_paid =
            t.amount * t.spot_at_trade * (0.01 + 0.08 * u(rng));
        trades.push_back(t);
    }

    const MispricingOutput out = compute_mispricing(trades, vp, returns);
    bool signs_ok = !out.rows.empty();
    for (const auto& row : out.rows) {
        const double expected =
            (row.benchmark - row.observed) / row.observed;
        if (row.delta_price != expected) signs_ok = false;
        if ((row.delta_price > 0) != (row.benchmark > row.observed))
            signs_ok = false;
    }

    const Design design = build_design(out.rows);
    double worst_mean = 0, worst_sd = 0;
    const auto rows_n = design.X.rows();
    for (int j = 1; j <= 6; ++j) {
        const double mean = design.X.col(j).mean();
        const double sd = std::sqrt(
            (design.X.col(j).array() - mean).square().sum() / (rows_n - 1));
        worst_mean = std::max(worst_mean, std::abs(mean));
        worst_sd = std::max(worst_sd, std::abs(sd - 1.0));
    }

    // orthogonal sign-pattern design: every VIF must be exactly one
    Eigen::MatrixXd H(8, 4);
    for (int i = 0; i < 8; ++i) {
        H(i, 0) = 1;
        H(i, 1) = (i & 1) ? 1 : -1;
        H(i, 2) = (i & 2) ? 1 : -1;
        H(i, 3) = (i & 4) ? 1 : -1;
    }
    const auto vifs = variance_inflation_factors(H);
    double worst_vif = 0;
    for (double v : vifs) worst_vif = std::max(worst_vif, std::abs(v - 1.0));

    const bool ok =
        signs_ok && worst_mean < 1e-12 && worst_sd < 1e-12 && worst_vif < 1e-12;
    report(n, ok,
           "mispricing: delta-price sign/identity row-by-row on " +
           std::to_string(out.rows.size()) + " rows (" +
           (signs_ok ? "ok" : "VIOLATED") + "), standardized columns |mean| = " +
           fmt2(worst_mean) + ", |sd-1| = " + fmt2(worst_sd) +
           " (tol 1e-12), orthogonal-design |VIF-1| = " + fmt2(worst_vif) +
           " (tol 1e-12)");
}

// ---------------------------------------------------------------------------
// criteria 9 and 10: pipeline determinism and the sign-comparison block

#ifndef OPTBENCH_CLI_PATH
#define OPTBENCH_CLI_PATH "optbench"
#endif

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion9_and_10() {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path base = fs::temp_directory_path() / "optbench_acceptance";
    std::error_code ec;
    fs::remove_all(base, ec);
    fs::create_directories(base);
    const std::string cli = OPTBENCH_CLI_PATH;

    auto run = [&](const std::string& args) {
        const std::string cmd = "'" + cli + "' " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };

    int rc = run("gen-fixture --out '" + base.string() + "' --seed 777");
    const std::string cfg = (base / "config.json").string();
    const int rc1 = rc == 0 ? run("run --config '" + cfg + "' --out '" +
                                  (base / "out1").string() + "'")
                            : -1;
    const int rc2 = rc == 0 ? run("run --config '" + cfg + "' --out '" +
                                  (base / "out2").string() + "'")
                            : -1;

    bool identical = rc1 == 0 && rc2 == 0;
    std::size_t files_compared = 0;
    if (identical) {
        std::vector<fs::path> rel;
        for (const auto& entry : fs::recursive_directory_iterator(base / "out1"))
            if (entry.is_regular_file())
                rel.push_back(fs::relative(entry.path(), base / "out1"));
        std::sort(rel.begin(), rel.end());
        for (const auto& r : rel) {
            ++files_compared;
            if (!fs::exists(base / "out2" / r) ||
                read_file(base / "out1" / r) != read_file(base / "out2" / r)) {
                identical = false;
                break;
            }
        }
        std::size_t count2 = 0;
        if (identical)
            for (const auto& entry :
                 fs::recursive_directory_iterator(base / "out2"))
                if (entry.is_regular_file()) ++count2;
        identical = identical && count2 == files_compared && files_compared > 0;
    }
    const double secs = elapsed_s(t0);
    const bool ok9 = rc == 0 && rc1 == 0 && rc2 == 0 && identical && secs < 600.0;
    report(9, ok9,
           "pipeline on the bundled fixture: exits " + std::to_string(rc1) + "/" +
           std::to_string(rc2) + ", " + std::to_string(files_compared) +
           " output files byte-identical across two seeded runs (" +
           (identical ? "yes" : "NO") + "), " + fmt2(secs) + " s (limit 600 s)");

    // criterion 10: documented-sign comparison block in the regression report
    const std::string rep =
        rc1 == 0 ? read_file(base / "out1" / "syntbtc_fgls_report.txt") : "";
    bool has_block = rep.find("sign_comparison") != std::string::npos;
    int flagged = 0;
    for (const std::string& name :
         {std::string("Amount"), std::string("Volume"), std::string("Strike"),
          std::string("Maturity"), std::string("Volatility"), std::string("Kind")}) {
        const auto pos = rep.find("  " + name + ": expected ");
        if (pos == std::string::npos) {
            has_block = false;
            continue;
        }
        const auto eol = rep.find('\n', pos);
        const std::string line = rep.substr(pos, eol - pos);
        if (line.find("match") != std::string::npos ||
            line.find("SIGN MISMATCH") != std::string::npos)
            ++flagged;
    }
    const bool ok10 = has_block && flagged == 6;
    report(10, ok10,
           "sign-comparison block present in the regression report with " +
           std::to_string(flagged) +
           "/6 documented targets flagged match/mismatch (no numeric tolerance)");
}

} // namespace

int main() {
    run_criterion(1, criterion1);
    run_criterion(2, criterion2);
    run_criterion(3, criterion3);
    run_criterion(4, criterion4);
    run_criterion(5, criterion5);
    run_criterion(6, criterion6);
    run_criterion(7, criterion7);
    run_criterion(8, criterion8);
    try {
        criterion9_and_10();
    } catch (const std::exception& e) {
        report(9, false, std::string("unexpected exception: ") + e.what());
        report(10, false, "skipped after criterion 9 failure");
    }
    if (g_failures == 0) std::printf("ALL CRITERIA PASSED\n");
    else std::printf("%d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}

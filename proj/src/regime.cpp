#include "optbench/regime.hpp"

#include "optbench/errors.hpp"
#include "optbench/optim.hpp"
#include "optbench/rng.hpp"
#include "optbench/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace optbench {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// theta packing: [mu0, phi0_1..a, log s2_0, mu1, phi1_1..a, log s2_1,
//                 logit p00, logit p11]
std::vector<double> pack(const MsArParams& p, int a) {
    std::vector<double> th;
    th.reserve(2 * (a + 2) + 2);
    for (int s = 0; s < 2; ++s) {
        th.push_back(p.mu[s]);
        for (int i = 0; i < a; ++i) th.push_back(p.phi[s][i]);
        th.push_back(std::log(p.sigma2[s]));
    }
    th.push_back(logit(p.p00));
    th.push_back(logit(p.p11));
    return th;
}

MsArParams unpack(const std::vector<double>& th, int a) {
    MsArParams p;
    std::size_t k = 0;
    for (int s = 0; s < 2; ++s) {
        p.mu[s] = th[k++];
        p.phi[s].resize(a);
        for (int i = 0; i < a; ++i) p.phi[s][i] = th[k++];
        p.sigma2[s] = std::exp(th[k++]);
    }
    p.p00 = logistic(th[k++]);
    p.p11 = logistic(th[k++]);
    return p;
}

double conditional_mean(const MsArParams& p, int s, std::span<const double> r,
                        std::size_t t, int a) {
    double m = p.mu[s];
    for (int i = 1; i <= a; ++i) m += p.phi[s][i - 1] * r[t - i];
    return m;
}

} // namespace

std::array<double, 2> MsArParams::stationary_distribution() const {
    const double q0 = 1.0 - p00; // leave-0 intensity
    const double q1 = 1.0 - p11;
    if (q0 + q1 <= 0) return {0.5, 0.5}; // both absorbing: flat prior
    return {q1 / (q0 + q1), q0 / (q0 + q1)};
}

HamiltonFilterResult hamilton_filter(const MsArParams& params,
                                     std::span<const double> returns, int ar_order,
                                     std::optional<std::array<double, 2>> init) {
    const std::size_t n = returns.size();
    const int a = ar_order;
    if (a < 1) throw EstimationError("hamilton_filter: ar_order must be >= 1");
    if (n <= static_cast<std::size_t>(a))
        throw EstimationError("hamilton_filter: series shorter than AR order");
    if (!(params.sigma2[0] > 0) || !(params.sigma2[1] > 0))
        throw EstimationError("hamilton_filter: variances must be positive");
    if (!(params.p00 > 0 && params.p00 <= 1 && params.p11 > 0 && params.p11 <= 1))
        throw EstimationError("hamilton_filter: transition rows must be stochastic");

    const double trans[2][2] = {{params.p00, 1.0 - params.p00},
                                {1.0 - params.p11, params.p11}};
    std::array<double, 2> prob = init ? *init : params.stationary_distribution();

    HamiltonFilterResult out;
    const std::size_t n_obs = n - a;
    out.predicted.reserve(n_obs);
    out.filtered.reserve(n_obs);
    out.log_cond_density.reserve(n_obs);

    const double log_norm_const[2] = {-0.5 * std::log(2.0 * M_PI * params.sigma2[0]),
                                      -0.5 * std::log(2.0 * M_PI * params.sigma2[1])};

    for (std::size_t t = static_cast<std::size_t>(a); t < n; ++t) {
        std::array<double, 2> pred{};
        if (t == static_cast<std::size_t>(a)) {
            pred = prob; // initial distribution applies to the first state
        } else {
            for (int s = 0; s < 2; ++s)
                pred[s] = prob[0] * trans[0][s] + prob[1] * trans[1][s];
        }
        double logf[2];
        for (int s = 0; s < 2; ++s) {
            const double e = returns[t] - conditional_mean(params, s, returns, t, a);
            logf[s] = log_norm_const[s] - 0.5 * e * e / params.sigma2[s];
        }
        const double lmax = std::max(logf[0], logf[1]);
        const double joint0 = pred[0] * std::exp(logf[0] - lmax);
        const double joint1 = pred[1] * std::exp(logf[1] - lmax);
        const double c = joint0 + joint1;
        if (!(c > 0) || !std::isfinite(c))
            throw EstimationError("hamilton_filter: numerical underflow at t=" +
                                  std::to_string(t));
        prob = {joint0 / c, joint1 / c};
        out.predicted.push_back(pred);
        out.filtered.push_back(prob);
        out.log_cond_density.push_back(std::log(c) + lmax);
        out.loglik += out.log_cond_density.back();
    }
    return out;
}

std::vector<std::array<double, 2>> kim_smooth(const MsArParams& params,
                                              const HamiltonFilterResult& filter) {
    const std::size_t n = filter.filtered.size();
    std::vector<std::array<double, 2>> smooth(n);
    if (n == 0) return smooth;
    const double trans[2][2] = {{params.p00, 1.0 - params.p00},
                                {1.0 - params.p11, params.p11}};
    smooth[n - 1] = filter.filtered[n - 1];
    for (std::size_t t = n - 1; t-- > 0;) {
        for (int s = 0; s < 2; ++s) {
            double acc = 0;
            for (int s2 = 0; s2 < 2; ++s2) {
                const double pred = filter.predicted[t + 1][s2];
                if (pred > 0) acc += trans[s][s2] * smooth[t + 1][s2] / pred;
            }
            smooth[t][s] = filter.filtered[t][s] * acc;
        }
        // renormalize against accumulated roundoff
        const double z = smooth[t][0] + smooth[t][1];
        if (z > 0) {
            smooth[t][0] /= z;
            smooth[t][1] /= z;
        }
    }
    return smooth;
}

std::vector<std::array<double, 2>> hamilton_smooth(
    const MsArParams& params, std::span<const double> returns, int ar_order,
    std::optional<std::array<double, 2>> init) {
    return kim_smooth(params, hamilton_filter(params, returns, ar_order, init));
}

namespace {

// Moment-based starting point: AR(a) least squares on the whole series, then
// a high/low split of the residual variance.
MsArParams initial_guess(std::span<const double> r, int a) {
    const std::size_t n = r.size();
    const std::size_t rows = n - a;
    Eigen::MatrixXd X(rows, a + 1);
    Eigen::VectorXd y(rows);
    for (std::size_t t = a; t < n; ++t) {
        X(t - a, 0) = 1.0;
        for (int i = 1; i <= a; ++i) X(t - a, i) = r[t - i];
        y(t - a) = r[t];
    }
    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    Eigen::VectorXd e = y - X * beta;
    const double v = e.squaredNorm() / static_cast<double>(rows);

    MsArParams p;
    for (int s = 0; s < 2; ++s) {
        p.mu[s] = beta(0);
        p.phi[s].resize(a);
        for (int i = 0; i < a; ++i) p.phi[s][i] = beta(i + 1);
    }
    p.sigma2[0] = 0.5 * v;
    p.sigma2[1] = 2.5 * v;
    p.p00 = 0.9;
    p.p11 = 0.9;
    return p;
}

} // namespace

MsArFit fit_msar(const ReturnSeries& series, const MsArSpec& spec, std::uint64_t seed,
                 const MsArFitOptions& options) {
    const int a = spec.ar_order;
    const std::vector<double> r = series.returns();
    const std::size_t n = r.size();
    if (a < 1) throw DataError("fit_msar: ar_order must be >= 1");
    if (static_cast<std::size_t>(a) * 10 >= n)
        throw DataError("fit_msar: ar_order too large for series length (identification)");
    if (n <= 10 * (2 * static_cast<std::size_t>(a) + 4))
        throw DataError("fit_msar: series too short for a two-regime AR(" +
                        std::to_string(a) + ") fit");
    for (double v : r)
        if (!std::isfinite(v)) throw DataError("fit_msar: non-finite return value");

    auto neg_loglik = [&](const std::vector<double>& th) -> double {
        MsArParams p = unpack(th, a);
        try {
            return -hamilton_filter(p, r, a).loglik;
        } catch (const EstimationError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const MsArParams guess = initial_guess(r, a);
    auto rng = substream(seed, "msar-multistart");
    std::normal_distribution<double> jitter(0.0, 1.0);

    LbfgsOptions lopts;
    lopts.max_iterations = options.max_iterations;

    bool any_converged = false;
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;
    double best_grad = std::numeric_limits<double>::infinity();

    for (std::size_t start = 0; start < std::max<std::size_t>(1, options.starts); ++start) {
        MsArParams p0 = guess;
        if (start > 0) {
            for (int s = 0; s < 2; ++s) {
                p0.mu[s] += 0.3 * jitter(rng);
                for (double& c : p0.phi[s]) c += 0.1 * jitter(rng);
                p0.sigma2[s] *= std::exp(0.5 * jitter(rng));
            }
            p0.p00 = logistic(logit(guess.p00) + jitter(rng));
            p0.p11 = logistic(logit(guess.p11) + jitter(rng));
        }
        LbfgsResult res = lbfgs_minimize(neg_loglik, pack(p0, a), lopts);
        if (res.f < best_f) {
            best_f = res.f;
            best_x = res.x;
            best_grad = res.grad_norm;
            any_converged = res.converged || any_converged;
        } else if (res.converged) {
            any_converged = true;
        }
    }
    if (best_x.empty() || !std::isfinite(best_f))
        throw EstimationError("fit_msar: all starts diverged");
    if (!any_converged)
        throw EstimationError("fit_msar: no start converged; best -loglik " +
                              std::to_string(best_f) + ", grad sup-norm " +
                              std::to_string(best_grad));

    MsArParams p_hat = unpack(best_x, a);
    for (int s = 0; s < 2; ++s) {
        if (p_hat.sigma2[s] < options.variance_floor)
            throw EstimationError("fit_msar: degenerate regime " + std::to_string(s) +
                                  " (variance below floor)");
    }

    MsArFit fit;
    fit.spec = spec;
    fit.params = p_hat;
    HamiltonFilterResult filt = hamilton_filter(p_hat, r, a);
    fit.smoothed = kim_smooth(p_hat, filt);
    fit.loglik = filt.loglik;
    fit.n_obs = filt.filtered.size();
    fit.n_params = 2 * (static_cast<std::size_t>(a) + 2) + 2;
    fit.aic = 2.0 * static_cast<double>(fit.n_params) - 2.0 * fit.loglik;
    fit.bic = static_cast<double>(fit.n_params) * std::log(static_cast<double>(fit.n_obs)) -
              2.0 * fit.loglik;
    fit.dates.reserve(fit.n_obs);
    for (std::size_t t = static_cast<std::size_t>(a); t < series.obs.size(); ++t)
        fit.dates.push_back(series.obs[t].date);

    if (options.compute_std_errors) {
        const std::size_t k = best_x.size();
        const std::size_t T = fit.n_obs;
        // Per-observation scores by central differences on log c_t.
        Eigen::MatrixXd scores(T, k);
        std::vector<double> th = best_x;
        for (std::size_t j = 0; j < k; ++j) {
            const double h = 1e-5 * std::max(1.0, std::fabs(th[j]));
            const double saved = th[j];
            th[j] = saved + h;
            auto up = hamilton_filter(unpack(th, a), r, a).log_cond_density;
            th[j] = saved - h;
            auto dn = hamilton_filter(unpack(th, a), r, a).log_cond_density;
            th[j] = saved;
            for (std::size_t t = 0; t < T; ++t)
                scores(t, j) = (up[t] - dn[t]) / (2.0 * h);
        }
        Eigen::MatrixXd opg = scores.transpose() * scores;
        auto hess = numeric_hessian(neg_loglik, best_x, 1e-4);
        Eigen::MatrixXd H(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) H(i, j) = hess[i][j];
        Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
        fit.std_errors.assign(k, std::numeric_limits<double>::quiet_NaN());
        if (lu.isInvertible()) {
            Eigen::MatrixXd Hinv = lu.inverse();
            Eigen::MatrixXd cov = Hinv * opg * Hinv; // sandwich in theta space
            // Delta method back to natural space.
            Eigen::VectorXd jac = Eigen::VectorXd::Ones(k);
            jac(a + 1) = p_hat.sigma2[0];              // d sigma2 / d log sigma2
            jac(2 * (a + 2) - 1) = p_hat.sigma2[1];
            jac(k - 2) = p_hat.p00 * (1.0 - p_hat.p00); // d p / d logit p
            jac(k - 1) = p_hat.p11 * (1.0 - p_hat.p11);
            for (std::size_t j = 0; j < k; ++j) {
                const double v = cov(j, j) * jac(j) * jac(j);
                if (v >= 0) fit.std_errors[j] = std::sqrt(v);
            }
        }
    }
    return fit;
}

RegimeLabels classify(const MsArFit& fit) {
    if (fit.smoothed.empty()) throw EstimationError("classify: no smoothed path");
    RegimeLabels out;
    out.dates = fit.dates;
    out.labels.reserve(fit.smoothed.size());
    for (const auto& p : fit.smoothed) {
        const int arg = p[1] > p[0] ? 1 : 0;
        out.labels.push_back(p[arg] > 0.5 ? arg : kRegimeUncertain);
    }
    out.high_volatility_regime = fit.params.sigma2[1] > fit.params.sigma2[0] ? 1 : 0;
    out.expected_duration[0] = 1.0 / (1.0 - fit.params.p00);
    out.expected_duration[1] = 1.0 / (1.0 - fit.params.p11);
    return out;
}

} // namespace optbench

#include "optbench/garch.hpp"

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

constexpr double kOmegaFloor = 1e-12;

struct SkewTConstants {
    double log_c;
    double a;
    double b;
};

SkewTConstants skew_t_constants(double eta, double lambda) {
    SkewTConstants k;
    k.log_c = std::lgamma(0.5 * (eta + 1.0)) - std::lgamma(0.5 * eta) -
              0.5 * std::log(M_PI * (eta - 2.0));
    const double c = std::exp(k.log_c);
    k.a = 4.0 * lambda * c * (eta - 2.0) / (eta - 1.0);
    k.b = std::sqrt(1.0 + 3.0 * lambda * lambda - k.a * k.a);
    return k;
}

} // namespace

double skewed_t_log_pdf(double z, double eta, double lambda) {
    if (!(eta > 2.0) || !(lambda > -1.0 && lambda < 1.0))
        throw EstimationError("skewed_t: require eta > 2 and lambda in (-1, 1)");
    const SkewTConstants k = skew_t_constants(eta, lambda);
    const double denom = z < -k.a / k.b ? 1.0 - lambda : 1.0 + lambda;
    const double u = (k.b * z + k.a) / denom;
    return std::log(k.b) + k.log_c -
           0.5 * (eta + 1.0) * std::log1p(u * u / (eta - 2.0));
}

double skewed_t_pdf(double z, double eta, double lambda) {
    return std::exp(skewed_t_log_pdf(z, eta, lambda));
}

double GarchParams::persistence() const {
    double s = 0;
    for (double v : alpha) s += v;
    for (double v : beta) s += v;
    for (double v : gamma) s += 0.5 * v;
    return s;
}

std::vector<double> garch_variance_path(const GarchParams& params, const GarchSpec& spec,
                                        std::span<const double> returns) {
    const std::size_t n = returns.size();
    std::vector<double> eps(n);
    double presample_var = 0;
    for (std::size_t t = 0; t < n; ++t) {
        eps[t] = returns[t] - params.mu;
        presample_var += eps[t] * eps[t];
    }
    presample_var /= static_cast<double>(n);
    if (!(presample_var > 0)) presample_var = kOmegaFloor;

    const double omega = std::max(params.omega, kOmegaFloor);
    std::vector<double> sigma2(n);
    for (std::size_t t = 0; t < n; ++t) {
        double v = omega;
        for (int i = 1; i <= spec.p; ++i) {
            const double e2 = t >= static_cast<std::size_t>(i)
                                  ? eps[t - i] * eps[t - i]
                                  : 0.0; // presample epsilon = 0
            v += params.alpha[i - 1] * e2;
        }
        for (int i = 1; i <= spec.o; ++i) {
            const double e = t >= static_cast<std::size_t>(i) ? eps[t - i] : 0.0;
            v += params.gamma[i - 1] * e * e * (e < 0 ? 1.0 : 0.0);
        }
        for (int j = 1; j <= spec.q; ++j) {
            const double s2 =
                t >= static_cast<std::size_t>(j) ? sigma2[t - j] : presample_var;
            v += params.beta[j - 1] * s2;
        }
        sigma2[t] = v;
    }
    return sigma2;
}

double garch_loglik(const GarchParams& params, const GarchSpec& spec,
                    std::span<const double> returns) {
    const std::vector<double> sigma2 = garch_variance_path(params, spec, returns);
    double ll = 0;
    for (std::size_t t = 0; t < returns.size(); ++t) {
        if (!(sigma2[t] > 0) || !std::isfinite(sigma2[t]))
            return -std::numeric_limits<double>::infinity();
        const double sd = std::sqrt(sigma2[t]);
        const double z = (returns[t] - params.mu) / sd;
        ll += skewed_t_log_pdf(z, params.eta, params.lambda) - std::log(sd);
    }
    return ll;
}

namespace {

// theta packing: [mu, log omega, log alpha_i.., gamma_i.., log beta_j..,
//                 log(eta - 2.01), atanh(lambda)]
std::vector<double> pack(const GarchParams& p, const GarchSpec& spec) {
    std::vector<double> th;
    th.push_back(p.mu);
    th.push_back(std::log(std::max(p.omega, kOmegaFloor)));
    for (int i = 0; i < spec.p; ++i) th.push_back(std::log(std::max(p.alpha[i], 1e-8)));
    for (int i = 0; i < spec.o; ++i) th.push_back(p.gamma[i]);
    for (int j = 0; j < spec.q; ++j) th.push_back(std::log(std::max(p.beta[j], 1e-8)));
    th.push_back(std::log(std::max(p.eta - 2.01, 1e-6)));
    th.push_back(std::atanh(std::clamp(p.lambda, -0.999, 0.999)));
    return th;
}

GarchParams unpack(const std::vector<double>& th, const GarchSpec& spec) {
    GarchParams p;
    std::size_t k = 0;
    p.mu = th[k++];
    p.omega = std::exp(th[k++]);
    p.alpha.resize(spec.p);
    for (int i = 0; i < spec.p; ++i) p.alpha[i] = std::exp(th[k++]);
    p.gamma.resize(spec.o);
    for (int i = 0; i < spec.o; ++i) p.gamma[i] = th[k++];
    p.beta.resize(spec.q);
    for (int j = 0; j < spec.q; ++j) p.beta[j] = std::exp(th[k++]);
    // clamp so extreme line-search points stay inside the density's domain
    p.eta = 2.01 + std::exp(std::min(th[k++], 50.0));
    p.lambda = std::clamp(std::tanh(th[k++]), -1.0 + 1e-10, 1.0 - 1e-10);
    return p;
}

} // namespace

GarchFit fit_garch(const ReturnSeries& subsample, const GarchSpec& spec,
                   std::uint64_t seed, const GarchFitOptions& options) {
    if (spec.p < 0 || spec.o < 0 || spec.q < 0)
        throw DataError("fit_garch: negative order");
    const std::vector<double> r = subsample.returns();
    if (r.size() < options.min_length)
        throw DataError("fit_garch: subsample length " + std::to_string(r.size()) +
                        " below identification guard " +
                        std::to_string(options.min_length));

    auto neg_loglik = [&](const std::vector<double>& th) -> double {
        const GarchParams p = unpack(th, spec);
        const double ll = garch_loglik(p, spec, r);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };

    GarchParams init;
    init.mu = mean_of(r);
    const double var = sample_variance(r);
    init.alpha.assign(spec.p, 0.05 / std::max(1, spec.p));
    init.gamma.assign(spec.o, 0.02 / std::max(1, spec.o));
    init.beta.assign(spec.q, 0.85 / std::max(1, spec.q));
    init.omega = std::max(var * 0.10, kOmegaFloor);
    init.eta = 6.0;
    init.lambda = 0.0;

    LbfgsOptions lopts;
    lopts.max_iterations = options.max_iterations;

    auto rng = substream(seed, "garch-restarts");
    std::normal_distribution<double> jitter(0.0, 0.3);

    LbfgsResult best;
    best.f = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (std::size_t attempt = 0; attempt <= options.restarts; ++attempt) {
        std::vector<double> th0 = pack(init, spec);
        if (attempt > 0)
            for (double& v : th0) v += jitter(rng);
        LbfgsResult res = lbfgs_minimize(neg_loglik, th0, lopts);
        if (res.f < best.f) best = res;
        if (res.converged) {
            converged = true;
            break;
        }
    }
    if (best.x.empty() || !std::isfinite(best.f))
        throw EstimationError("fit_garch: optimization diverged (spec " +
                              std::to_string(spec.p) + "," + std::to_string(spec.o) +
                              "," + std::to_string(spec.q) + ")");

    GarchFit fit;
    fit.spec = spec;
    fit.params = unpack(best.x, spec);
    fit.converged = converged;
    fit.loglik = -best.f;
    fit.sigma2 = garch_variance_path(fit.params, spec, r);
    fit.std_resid.resize(r.size());
    for (std::size_t t = 0; t < r.size(); ++t)
        fit.std_resid[t] = (r[t] - fit.params.mu) / std::sqrt(fit.sigma2[t]);
    fit.persistence = fit.params.persistence();
    fit.stationary = fit.persistence < 1.0;
    const double k = static_cast<double>(spec.param_count());
    const double T = static_cast<double>(r.size());
    fit.aic = 2.0 * k - 2.0 * fit.loglik;
    fit.bic = k * std::log(T) - 2.0 * fit.loglik;

    if (r.size() > options.diagnostic_lags + 1) {
        try {
            const TestResult lb = ljung_box(fit.std_resid, options.diagnostic_lags);
            fit.ljung_box_stat = lb.statistic;
            fit.ljung_box_p = lb.p_value;
            const TestResult ar = engle_arch(fit.std_resid, options.diagnostic_lags);
            fit.arch_stat = ar.statistic;
            fit.arch_p = ar.p_value;
        } catch (const EstimationError&) {
            fit.ljung_box_p = fit.arch_p = std::numeric_limits<double>::quiet_NaN();
        }
    }

    if (options.compute_std_errors) {
        const std::size_t kp = best.x.size();
        auto hess = numeric_hessian(neg_loglik, best.x, 1e-4);
        Eigen::MatrixXd H(kp, kp);
        for (std::size_t i = 0; i < kp; ++i)
            for (std::size_t j = 0; j < kp; ++j) H(i, j) = hess[i][j];
        fit.std_errors.assign(kp, std::numeric_limits<double>::quiet_NaN());
        Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
        if (lu.isInvertible()) {
            Eigen::MatrixXd cov = lu.inverse();
            // Delta method to natural space; transform Jacobian is diagonal.
            std::vector<double> jac(kp, 1.0);
            std::size_t idx = 1;
            jac[idx++] = fit.params.omega;
            for (int i = 0; i < spec.p; ++i) jac[idx++] = fit.params.alpha[i];
            idx += spec.o; // gamma untransformed
            for (int j = 0; j < spec.q; ++j) jac[idx++] = fit.params.beta[j];
            jac[idx++] = fit.params.eta - 2.01;
            jac[idx++] = 1.0 - fit.params.lambda * fit.params.lambda;
            for (std::size_t j = 0; j < kp; ++j) {
                const double v = cov(j, j) * jac[j] * jac[j];
                if (v >= 0) fit.std_errors[j] = std::sqrt(v);
            }
        }
    }
    return fit;
}

BicSelection select_by_bic(const ReturnSeries& subsample, std::uint64_t seed,
                           const GarchGrid& grid, const GarchFitOptions& options) {
    if (grid.p_max < 1 || grid.p_max > 10 || grid.q_max < 1 || grid.q_max > 10 ||
        grid.o_max < 0 || grid.o_max > 5)
        throw ConfigError("select_by_bic: grid bounds must satisfy p,q in 1..10, o in 0..5");

    BicSelection sel;
    bool have = false;
    for (int p = 1; p <= grid.p_max; ++p) {
        for (int o = 0; o <= grid.o_max; ++o) {
            for (int q = 1; q <= grid.q_max; ++q) {
                GarchSpec spec{p, o, q};
                ++sel.fits_tried;
                GarchFit fit;
                try {
                    fit = fit_garch(subsample, spec, seed, options);
                } catch (const EstimationError&) {
                    continue;
                }
                if (!fit.converged || !fit.stationary) continue;
                ++sel.fits_admissible;
                const auto order = [](const GarchSpec& s, double bic) {
                    return std::make_tuple(bic, s.p + s.o + s.q, s.o, s.q, s.p);
                };
                if (!have || order(spec, fit.bic) < order(sel.spec, sel.fit.bic)) {
                    sel.spec = spec;
                    sel.fit = std::move(fit);
                    have = true;
                }
            }
        }
    }
    if (!have)
        throw EstimationError("select_by_bic: no admissible (converged, stationary) "
                              "fit on the grid");
    return sel;
}

TestResult ljung_box(std::span<const double> residuals, std::size_t lags) {
    if (lags < 1) throw DataError("ljung_box: lags must be >= 1");
    if (residuals.size() <= lags)
        throw DataError("ljung_box: need more residuals than lags");
    const std::vector<double> rho = autocorrelations(residuals, lags);
    const double n = static_cast<double>(residuals.size());
    double q = 0;
    for (std::size_t k = 1; k <= lags; ++k)
        q += rho[k - 1] * rho[k - 1] / (n - static_cast<double>(k));
    q *= n * (n + 2.0);
    return {q, chi_square_sf(q, static_cast<double>(lags))};
}

TestResult engle_arch(std::span<const double> residuals, std::size_t lags) {
    if (lags < 1) throw DataError("engle_arch: lags must be >= 1");
    const std::size_t n = residuals.size();
    if (n <= lags + 1) throw DataError("engle_arch: need more residuals than lags");
    std::vector<double> e2(n);
    for (std::size_t t = 0; t < n; ++t) e2[t] = residuals[t] * residuals[t];
    if (sample_variance(e2) <= 0)
        throw EstimationError("engle_arch: degenerate (constant) squared residuals");
    const std::size_t rows = n - lags;
    Eigen::MatrixXd X(rows, lags + 1);
    Eigen::VectorXd y(rows);
    for (std::size_t t = lags; t < n; ++t) {
        X(t - lags, 0) = 1.0;
        for (std::size_t i = 1; i <= lags; ++i) X(t - lags, i) = e2[t - i];
        y(t - lags) = e2[t];
    }
    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    Eigen::VectorXd resid = y - X * beta;
    const double tss = (y.array() - y.mean()).matrix().squaredNorm();
    if (!(tss > 0))
        throw EstimationError("engle_arch: zero total variation in squared residuals");
    const double r2 = 1.0 - resid.squaredNorm() / tss;
    const double lm = static_cast<double>(rows) * r2;
    return {lm, chi_square_sf(lm, static_cast<double>(lags))};
}

double VolatilityPath::sigma_at(Date d) const {
    auto it = std::lower_bound(points.begin(), points.end(), d,
                               [](const VolPoint& p, Date x) { return p.date < x; });
    if (it == points.end() || it->date != d)
        throw DataError("volatility path: no entry for date " + format_date(d));
    return it->sigma_annualized;
}

VolatilityPath build_vol_path(const RegimeLabels& labels,
                              const std::array<GarchFit, 2>& fits,
                              double annualization_factor) {
    VolatilityPath path;
    path.points.reserve(labels.dates.size());
    std::array<std::size_t, 2> next_index{0, 0}; // position in each regime subsample
    double last_sigma = -1;
    int last_regime = kRegimeUncertain;
    std::vector<std::size_t> leading_uncertain;
    for (std::size_t i = 0; i < labels.dates.size(); ++i) {
        const int lab = labels.labels[i];
        VolPoint pt;
        pt.date = labels.dates[i];
        pt.regime = lab;
        if (lab == kRegimeUncertain) {
            if (last_sigma > 0) {
                pt.sigma_annualized = last_sigma; // nearest past, no lookahead
                pt.regime = last_regime;
            } else {
                leading_uncertain.push_back(i); // backfilled from the first labeled day
            }
        } else {
            const std::size_t idx = next_index[lab]++;
            if (idx >= fits[lab].sigma2.size())
                throw DataError("build_vol_path: regime " + std::to_string(lab) +
                                " fit does not cover day " + format_date(pt.date));
            const double daily_var = fits[lab].sigma2[idx];
            pt.sigma_annualized = std::sqrt(annualization_factor * daily_var) / 100.0;
            last_sigma = pt.sigma_annualized;
            last_regime = lab;
            for (std::size_t j : leading_uncertain) {
                path.points[j].sigma_annualized = pt.sigma_annualized;
                path.points[j].regime = lab;
            }
            leading_uncertain.clear();
        }
        path.points.push_back(pt);
    }
    if (!leading_uncertain.empty())
        throw EstimationError("build_vol_path: no labeled day to anchor the path");
    return path;
}

std::vector<VolPoint> rolling_realized_vol(const ReturnSeries& series, int window,
                                           double annualization_factor) {
    std::vector<VolPoint> out;
    const std::vector<double> r = series.returns();
    if (window < 2 || r.size() < static_cast<std::size_t>(window)) return out;
    for (std::size_t t = window - 1; t < r.size(); ++t) {
        std::span<const double> w(r.data() + t + 1 - window, window);
        VolPoint pt;
        pt.date = series.obs[t].date;
        pt.sigma_annualized =
            std::sqrt(annualization_factor * sample_variance(w)) / 100.0;
        out.push_back(pt);
    }
    return out;
}

} // namespace optbench

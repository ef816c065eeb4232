#include "optbench/pricing.hpp"

#include "optbench/errors.hpp"
#include "optbench/stats.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>

namespace optbench {

namespace {

void check_input(const PricingInput& in, bool need_sigma) {
    if (!(in.spot > 0)) throw DataError("bs_price: spot must be > 0");
    if (!(in.strike > 0)) throw DataError("bs_price: strike must be > 0");
    if (!(in.maturity > 0)) throw DataError("bs_price: maturity must be > 0");
    if (need_sigma && !(in.sigma > 0)) throw DataError("bs_price: sigma must be > 0");
}

} // namespace

double bs_price(const PricingInput& in, OptionKind kind) {
    check_input(in, false);
    if (in.sigma < 0) throw DataError("bs_price: sigma must be >= 0");
    const double S = in.spot, K = in.strike, T = in.maturity;
    const double disc = std::exp(-in.rate * T);
    const double vol_sqrt_t = in.sigma * std::sqrt(T);
    if (vol_sqrt_t < 1e-14) {
        // sigma -> 0 limit: discounted intrinsic on the forward.
        const double fwd = S / disc;
        if (kind == OptionKind::Call) return disc * std::max(fwd - K, 0.0);
        return disc * std::max(K - fwd, 0.0);
    }
    const double d1 =
        (std::log(S / K) + (in.rate + 0.5 * in.sigma * in.sigma) * T) / vol_sqrt_t;
    const double d2 = d1 - vol_sqrt_t;
    if (kind == OptionKind::Call) return S * norm_cdf(d1) - K * disc * norm_cdf(d2);
    return K * disc * norm_cdf(-d2) - S * norm_cdf(-d1);
}

ArbitrageBand arbitrage_band(const PricingInput& in, OptionKind kind) {
    check_input(in, false);
    const double disc = std::exp(-in.rate * in.maturity);
    ArbitrageBand band;
    if (kind == OptionKind::Call) {
        band.lower = std::max(in.spot - in.strike * disc, 0.0);
        band.upper = in.spot;
    } else {
        band.lower = std::max(in.strike * disc - in.spot, 0.0);
        band.upper = in.strike * disc;
    }
    return band;
}

double implied_vol(double premium, const PricingInput& base, OptionKind kind) {
    check_input(base, false);
    const ArbitrageBand band = arbitrage_band(base, kind);
    if (!(premium > band.lower))
        throw EstimationError("implied_vol: premium " + std::to_string(premium) +
                              " at or below the discounted-intrinsic lower bound " +
                              std::to_string(band.lower));
    if (!(premium < band.upper))
        throw EstimationError("implied_vol: premium " + std::to_string(premium) +
                              " at or above the upper bound " + std::to_string(band.upper));

    const double lo = 1e-6, hi = 10.0;
    auto objective = [&](double sigma) {
        PricingInput in = base;
        in.sigma = sigma;
        return bs_price(in, kind) - premium;
    };
    const double f_lo = objective(lo);
    const double f_hi = objective(hi);
    if (f_lo > 0 || f_hi < 0)
        throw EstimationError("implied_vol: root not bracketed on sigma in [1e-6, 10]");

    boost::math::tools::eps_tolerance<double> tol(60);
    std::uintmax_t max_iter = 200;
    auto r = boost::math::tools::toms748_solve(objective, lo, hi, f_lo, f_hi, tol, max_iter);
    const double sigma = 0.5 * (r.first + r.second);
    if (std::fabs(objective(sigma)) > 1e-10 * std::max(1.0, premium))
        throw EstimationError("implied_vol: bracket exhausted before residual tolerance");
    return sigma;
}

double put_call_parity_gap(const PricingInput& in) {
    return bs_price(in, OptionKind::Call) - bs_price(in, OptionKind::Put) - in.spot +
           in.strike * std::exp(-in.rate * in.maturity);
}

} // namespace optbench

#include <doctest.h>

#include "optbench/errors.hpp"
#include "optbench/pricing.hpp"
#include "optbench/rng.hpp"

#include <cmath>
#include <random>

using namespace optbench;

namespace {

// Quadrature oracle: discounted expected payoff under the lognormal terminal
// law, integrating the standard-normal density with Simpson's rule on each
// side of the payoff kink.
double quadrature_price(const PricingInput& in, OptionKind kind) {
    const double sqt = in.sigma * std::sqrt(in.maturity);
    const double drift = (in.rate - 0.5 * in.sigma * in.sigma) * in.maturity;
    auto terminal = [&](double z) { return in.spot * std::exp(drift + sqt * z); };
    auto payoff = [&](double z) {
        const double st = terminal(z);
        return kind == OptionKind::Call ? std::max(st - in.strike, 0.0)
                                        : std::max(in.strike - st, 0.0);
    };
    auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI); };
    auto simpson = [&](double lo, double hi, int n) {
        double acc = payoff(lo) * phi(lo) + payoff(hi) * phi(hi);
        const double h = (hi - lo) / n;
        for (int i = 1; i < n; ++i)
            acc += payoff(lo + i * h) * phi(lo + i * h) * (i % 2 ? 4.0 : 2.0);
        return acc * h / 3.0;
    };
    const double zstar =
        std::clamp((std::log(in.strike / in.spot) - drift) / sqt, -12.0, 12.0);
    const double integral =
        simpson(-12.0, zstar, 40000) + simpson(zstar, 12.0, 40000);
    return std::exp(-in.rate * in.maturity) * integral;
}

} // namespace

TEST_CASE("prices agree with the quadrature oracle") {
    auto rng = substream(17, "pricing-quadrature");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 40; ++rep) {
        PricingInput in;
        in.spot = 50 + 45000 * u(rng);
        in.strike = in.spot * (0.6 + 0.8 * u(rng));
        in.rate = 0.08 * u(rng);
        in.maturity = (7 + 83 * u(rng)) / 365.0;
        in.sigma = 0.1 + 1.4 * u(rng);
        for (OptionKind kind : {OptionKind::Call, OptionKind::Put}) {
            const double bs = bs_price(in, kind);
            const double oracle = quadrature_price(in, kind);
            CHECK(std::abs(bs - oracle) < 1e-6 * std::max(1.0, oracle));
        }
    }
}

TEST_CASE("put-call parity holds on randomized inputs") {
    auto rng = substream(18, "pricing-parity");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        PricingInput in;
        in.spot = 1 + 1000 * u(rng);
        in.strike = in.spot * (0.5 + u(rng));
        in.rate = 0.1 * u(rng);
        in.maturity = 0.01 + u(rng);
        in.sigma = 0.05 + 2 * u(rng);
        CHECK(std::abs(put_call_parity_gap(in)) <
              1e-10 * std::max(1.0, in.spot));
    }
}

TEST_CASE("vanishing volatility and vanishing strike limits") {
    PricingInput in{100.0, 90.0, 0.05, 0.5, 1e-13};
    const double df = std::exp(-in.rate * in.maturity);
    // sigma -> 0: discounted intrinsic on the forward
    CHECK(bs_price(in, OptionKind::Call) ==
          doctest::Approx(in.spot - in.strike * df).epsilon(1e-10));
    CHECK(bs_price(in, OptionKind::Put) == doctest::Approx(0.0).epsilon(1e-10));

    PricingInput deep{100.0, 1e-12, 0.03, 0.25, 0.6};
    // K -> 0: a call is worth the spot, a put nothing
    CHECK(bs_price(deep, OptionKind::Call) ==
          doctest::Approx(deep.spot).epsilon(1e-10));
    CHECK(bs_price(deep, OptionKind::Put) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("monotonicity and scale invariance") {
    auto rng = substream(19, "pricing-monotone");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        PricingInput in;
        in.spot = 10 + 500 * u(rng);
        in.strike = in.spot * (0.7 + 0.6 * u(rng));
        in.rate = 0.06 * u(rng);
        in.maturity = 0.02 + u(rng);
        in.sigma = 0.1 + u(rng);

        PricingInput hi_sigma = in;
        hi_sigma.sigma += 0.1;
        CHECK(bs_price(hi_sigma, OptionKind::Call) > bs_price(in, OptionKind::Call));
        CHECK(bs_price(hi_sigma, OptionKind::Put) > bs_price(in, OptionKind::Put));

        PricingInput hi_spot = in;
        hi_spot.spot *= 1.05;
        CHECK(bs_price(hi_spot, OptionKind::Call) >= bs_price(in, OptionKind::Call));
        CHECK(bs_price(hi_spot, OptionKind::Put) <= bs_price(in, OptionKind::Put));

        PricingInput hi_strike = in;
        hi_strike.strike *= 1.05;
        CHECK(bs_price(hi_strike, OptionKind::Call) <= bs_price(in, OptionKind::Call));
        CHECK(bs_price(hi_strike, OptionKind::Put) >= bs_price(in, OptionKind::Put));

        const double c = 1 + 9 * u(rng);
        PricingInput scaled = in;
        scaled.spot *= c;
        scaled.strike *= c;
        CHECK(bs_price(scaled, OptionKind::Call) ==
              doctest::Approx(c * bs_price(in, OptionKind::Call)).epsilon(1e-12));
        CHECK(bs_price(scaled, OptionKind::Put) ==
              doctest::Approx(c * bs_price(in, OptionKind::Put)).epsilon(1e-12));
    }
}

TEST_CASE("implied volatility round-trips the pricer") {
    auto rng = substream(20, "pricing-iv");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        PricingInput in;
        in.spot = 100 + 40000 * u(rng);
        in.rate = 0.05 * u(rng);
        in.maturity = (7 + 83 * u(rng)) / 365.0;
        in.sigma = 0.1 + 2.0 * u(rng);
        const OptionKind kind = u(rng) < 0.5 ? OptionKind::Call : OptionKind::Put;
        // at- and out-of-the-money only (the quoted grid): deep in-the-money
        // premiums are nearly all intrinsic, where sigma is unidentifiable
        // at double precision
        in.strike = in.spot * (kind == OptionKind::Call ? 1.0 + 0.3 * u(rng)
                                                        : 1.0 - 0.3 * u(rng));
        const double premium = bs_price(in, kind);
        const double iv = implied_vol(premium, in, kind);
        CHECK(std::abs(iv - in.sigma) < 1e-6 * std::max(1.0, in.sigma));
    }
}

TEST_CASE("premiums outside the arbitrage band are rejected with the bound named") {
    PricingInput in{100.0, 110.0, 0.02, 30.0 / 365.0, 0.0};
    const ArbitrageBand call_band = arbitrage_band(in, OptionKind::Call);
    CHECK(call_band.lower == doctest::Approx(0.0));
    CHECK(call_band.upper == doctest::Approx(100.0));
    const ArbitrageBand put_band = arbitrage_band(in, OptionKind::Put);
    CHECK(put_band.upper ==
          doctest::Approx(110.0 * std::exp(-0.02 * 30.0 / 365.0)).epsilon(1e-14));
    CHECK(put_band.lower ==
          doctest::Approx(110.0 * std::exp(-0.02 * 30.0 / 365.0) - 100.0)
              .epsilon(1e-12));

    CHECK_THROWS_AS(implied_vol(101.0, in, OptionKind::Call), EstimationError);
    CHECK_THROWS_AS(implied_vol(-0.5, in, OptionKind::Call), EstimationError);
    CHECK_THROWS_WITH_AS(implied_vol(200.0, in, OptionKind::Put),
                         doctest::Contains("upper"), EstimationError);
}

#pragma once

#include "optbench/market_data.hpp"

namespace optbench {

struct PricingInput {
    double spot = 0;     ///< S > 0
    double strike = 0;   ///< K > 0
    double rate = 0;     ///< continuously compounded annual rate
    double maturity = 0; ///< T in years (> 0), actual/365
    double sigma = 0;    ///< annualized volatility (> 0)
};

/// Black-Scholes premium per contract. The sigma*sqrt(T) -> 0 limit returns
/// discounted intrinsic value rather than erroring.
double bs_price(const PricingInput& in, OptionKind kind);

/// Implied volatility by bracketed root-finding on sigma in [1e-6, 10].
/// Throws EstimationError when the premium violates a no-arbitrage bound
/// (the message names the bound) or the bracket is exhausted.
double implied_vol(double premium, const PricingInput& in_without_sigma, OptionKind kind);

/// C - P - S + K*exp(-rT); a pricing self-test, ~0 for matched inputs.
double put_call_parity_gap(const PricingInput& in);

/// No-arbitrage band for a premium: (lower, upper) =
/// (discounted intrinsic, S) for calls and (discounted intrinsic, K e^{-rT}) for puts.
struct ArbitrageBand {
    double lower = 0;
    double upper = 0;
};
ArbitrageBand arbitrage_band(const PricingInput& in_without_sigma, OptionKind kind);

} // namespace optbench

#pragma once

#include "optbench/market_data.hpp"

#include <map>
#include <string>
#include <vector>

namespace optbench {

/// Fixed quote grid: calls at 100/110/120/130 % of the oracle price, puts at
/// 100/90/80/70 %, maturities 7..90 days. No in-the-money strikes.
struct StrikeGrid {
    static const std::vector<int>& call_steps(); // percent of spot
    static const std::vector<int>& put_steps();
    static constexpr int min_maturity_days = 7;
    static constexpr int max_maturity_days = 90;
    static bool is_valid_step(OptionKind kind, int step_percent);
};

/// Rate v(K,T) per (kind, strike step, maturity bucket). Rates at unlisted
/// maturities interpolate linearly in days between listed buckets.
class RateTable {
public:
    void set(OptionKind kind, int step_percent, int maturity_days, double rate);

    /// Rate lookup; `interpolated` reports whether linear interpolation in
    /// maturity was used. Throws DataError when the (kind, step) cell has no
    /// rates or the maturity falls outside the listed bucket range.
    double rate(OptionKind kind, int step_percent, int maturity_days,
                bool* interpolated = nullptr) const;

    bool empty() const { return cells_.empty(); }

    /// `kind,step_percent,maturity_days,rate` file round-trip.
    static RateTable load(const std::string& path);
    void save(const std::string& path) const;

    /// Median implied rate per observed (kind, step, maturity) cell.
    /// With strip_settlement_fee, premiums are divided by (1 + r_s) first.
    static RateTable calibrate(const std::vector<OptionTrade>& trades,
                               bool strip_settlement_fee = false);

private:
    // key: (kind as int, step_percent) -> sorted maturity -> rate
    std::map<std::pair<int, int>, std::map<int, double>> cells_;
};

struct QuoteResult {
    double premium_per_contract = 0; ///< O = v * spot
    double settlement_fee = 0;       ///< s = amount * O * r_s
    double total_cost = 0;           ///< amount * O + s
    MoneynessType moneyness = MoneynessType::OTM;
    bool rate_interpolated = false;
};

/// Settlement rates published by the protocol: 1% ATM, 0.5% OTM.
constexpr double kSettlementRateAtm = 0.01;
constexpr double kSettlementRateOtm = 0.005;

QuoteResult quote(const RateTable& table, double spot, OptionKind kind,
                  int step_percent, int maturity_days, double amount);

/// Grid step (percent) implied by strike/spot, matched within 1e-3 relative.
/// Throws DataError naming the nearest step when nothing matches.
int validate_trade_against_grid(const OptionTrade& trade);

struct ImpliedRate {
    double rate = 0;
    bool suspicious = false; ///< zero premium
};

/// v = (premium_paid / amount) / spot, the quote rate implied by a trade.
ImpliedRate implied_rate(const OptionTrade& trade);

} // namespace optbench

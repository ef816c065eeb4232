#pragma once

#include "optbench/dates.hpp"
#include "optbench/stats.hpp"

#include <string>
#include <vector>

namespace optbench {

struct PricePoint {
    Date date = 0;
    double close = 0;  ///< strictly positive
    double volume = 0; ///< >= 0
};

struct ReturnObs {
    Date date = 0;
    double ret_pct = 0; ///< simple return in percent by default
    double volume = 0;  ///< volume of the return's day
};

struct ReturnSeries {
    std::string asset;
    std::vector<ReturnObs> obs;

    std::vector<double> returns() const;
    std::size_t size() const { return obs.size(); }
};

enum class OptionKind { Call, Put };
enum class MoneynessType { ATM, OTM };

struct OptionTrade {
    std::string trade_id;
    std::string underlying;
    OptionKind kind = OptionKind::Call;
    MoneynessType type = MoneynessType::OTM;
    double strike = 0;
    int maturity_days = 0; ///< in [7, 90]
    double amount = 0;     ///< contracts, fractional, > 0
    double premium_paid = 0;
    double spot_at_trade = 0;
    std::string timestamp;  ///< as read, ISO-8601
    Date trade_date = 0;    ///< calendar day of the timestamp
};

/// Parse `date,close,volume`, sort ascending, enforce positivity and
/// date uniqueness. Errors carry the offending file line.
std::vector<PricePoint> load_prices(const std::string& path);

/// Simple percentage returns: r_t = 100 * (close_t - close_{t-1}) / close_{t-1}.
/// With use_log_returns, r_t = 100 * ln(close_t / close_{t-1}).
ReturnSeries compute_returns(const std::vector<PricePoint>& prices,
                             const std::string& asset,
                             bool use_log_returns = false);

/// Summary moments of the return series (see SummaryStats conventions).
SummaryStats describe(const ReturnSeries& series);

/// Parse the trade book and enforce every OptionTrade invariant; any bad row
/// fails the whole load with a row-addressed error.
std::vector<OptionTrade> load_trades(const std::string& path);

std::string kind_name(OptionKind k);
std::string type_name(MoneynessType t);

} // namespace optbench

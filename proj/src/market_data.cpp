#include "optbench/market_data.hpp"

#include "optbench/csv.hpp"
#include "optbench/errors.hpp"

#include <algorithm>
#include <cmath>

namespace optbench {

namespace {
// Relative tolerance when matching recorded strikes to the quote grid;
// shared with the grid validator in the quoting module.
constexpr double kGridTol = 1e-3;
} // namespace

std::vector<double> ReturnSeries::returns() const {
    std::vector<double> r;
    r.reserve(obs.size());
    for (const auto& o : obs) r.push_back(o.ret_pct);
    return r;
}

std::string kind_name(OptionKind k) { return k == OptionKind::Call ? "call" : "put"; }
std::string type_name(MoneynessType t) { return t == MoneynessType::ATM ? "ATM" : "OTM"; }

std::vector<PricePoint> load_prices(const std::string& path) {
    CsvReader csv(path);
    if (csv.row_count() == 0) throw DataError(path + ": no price rows (empty series)");
    const std::size_t c_date = csv.column("date");
    const std::size_t c_close = csv.column("close");
    const std::size_t c_vol = csv.column("volume");
    std::vector<PricePoint> out;
    out.reserve(csv.row_count());
    for (std::size_t i = 0; i < csv.row_count(); ++i) {
        PricePoint p;
        try {
            p.date = parse_date(csv.cell(i, c_date));
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(csv.line_of(i)) + ": " + e.what());
        }
        p.close = csv.cell_double(i, c_close);
        p.volume = csv.cell_double(i, c_vol);
        if (!(p.close > 0))
            throw DataError(path + ":" + std::to_string(csv.line_of(i)) +
                            ": close must be strictly positive");
        if (p.volume < 0)
            throw DataError(path + ":" + std::to_string(csv.line_of(i)) +
                            ": volume must be non-negative");
        out.push_back(p);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const PricePoint& a, const PricePoint& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].date == out[i - 1].date)
            throw DataError(path + ": duplicate date " + format_date(out[i].date));
    }
    return out;
}

ReturnSeries compute_returns(const std::vector<PricePoint>& prices,
                             const std::string& asset, bool use_log_returns) {
    if (prices.size() < 2)
        throw DataError("compute_returns: need at least 2 price points, got " +
                        std::to_string(prices.size()));
    ReturnSeries s;
    s.asset = asset;
    s.obs.reserve(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        ReturnObs o;
        o.date = prices[i].date;
        o.ret_pct = use_log_returns
                        ? 100.0 * std::log(prices[i].close / prices[i - 1].close)
                        : 100.0 * (prices[i].close - prices[i - 1].close) / prices[i - 1].close;
        o.volume = prices[i].volume;
        s.obs.push_back(o);
    }
    return s;
}

SummaryStats describe(const ReturnSeries& series) {
    if (series.obs.empty()) throw DataError("describe: empty return series");
    return summarize(series.returns());
}

std::vector<OptionTrade> load_trades(const std::string& path) {
    CsvReader csv(path);
    const std::size_t c_id = csv.column("trade_id");
    const std::size_t c_under = csv.column("underlying");
    const std::size_t c_kind = csv.column("kind");
    const std::size_t c_type = csv.column("type");
    const std::size_t c_strike = csv.column("strike");
    const std::size_t c_mat = csv.column("maturity_days");
    const std::size_t c_amount = csv.column("amount");
    const std::size_t c_prem = csv.column("premium_paid");
    const std::size_t c_spot = csv.column("spot");
    const std::size_t c_ts = csv.column("timestamp");

    std::vector<OptionTrade> out;
    out.reserve(csv.row_count());
    for (std::size_t i = 0; i < csv.row_count(); ++i) {
        const std::string where = path + ":" + std::to_string(csv.line_of(i));
        OptionTrade t;
        t.trade_id = csv.cell(i, c_id);
        t.underlying = csv.cell(i, c_under);
        const std::string& kind = csv.cell(i, c_kind);
        if (kind == "call") t.kind = OptionKind::Call;
        else if (kind == "put") t.kind = OptionKind::Put;
        else throw DataError(where + ": unknown option kind '" + kind + "'");
        const std::string& type = csv.cell(i, c_type);
        if (type == "ATM") t.type = MoneynessType::ATM;
        else if (type == "OTM") t.type = MoneynessType::OTM;
        else throw DataError(where + ": unknown option type '" + type + "'");
        t.strike = csv.cell_double(i, c_strike);
        const double mat = csv.cell_double(i, c_mat);
        t.maturity_days = static_cast<int>(mat);
        if (mat != t.maturity_days || t.maturity_days < 7 || t.maturity_days > 90)
            throw DataError(where + ": maturity_days must be a whole number in [7, 90]");
        t.amount = csv.cell_double(i, c_amount);
        if (!(t.amount > 0)) throw DataError(where + ": amount must be > 0");
        t.premium_paid = csv.cell_double(i, c_prem);
        if (t.premium_paid < 0) throw DataError(where + ": premium_paid must be >= 0");
        t.spot_at_trade = csv.cell_double(i, c_spot);
        if (!(t.spot_at_trade > 0)) throw DataError(where + ": spot must be > 0");
        if (!(t.strike > 0)) throw DataError(where + ": strike must be > 0");
        t.timestamp = csv.cell(i, c_ts);
        t.trade_date = parse_date(t.timestamp);

        const double ratio = t.strike / t.spot_at_trade;
        const bool at_money = std::fabs(ratio - 1.0) <= kGridTol;
        if (t.kind == OptionKind::Call && ratio < 1.0 - kGridTol)
            throw DataError(where + ": in-the-money call (strike below spot grid point)");
        if (t.kind == OptionKind::Put && ratio > 1.0 + kGridTol)
            throw DataError(where + ": in-the-money put (strike above spot grid point)");
        if (at_money != (t.type == MoneynessType::ATM))
            throw DataError(where + ": type flag inconsistent with strike/spot ratio " +
                            format_double(ratio));
        bool on_grid = false;
        for (int s = 0; s <= 3 && !on_grid; ++s) {
            const double step = t.kind == OptionKind::Call ? 1.0 + 0.1 * s : 1.0 - 0.1 * s;
            on_grid = std::fabs(ratio - step) <= kGridTol * step;
        }
        if (!on_grid)
            throw DataError(where + ": strike/spot ratio " + format_double(ratio) +
                            " is not on the quote grid");
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace optbench

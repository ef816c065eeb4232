#include "optbench/amm.hpp"

#include "optbench/csv.hpp"
#include "optbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace optbench {

namespace {
constexpr double kGridTol = 1e-3;
} // namespace

const std::vector<int>& StrikeGrid::call_steps() {
    static const std::vector<int> steps = {100, 110, 120, 130};
    return steps;
}

const std::vector<int>& StrikeGrid::put_steps() {
    static const std::vector<int> steps = {100, 90, 80, 70};
    return steps;
}

bool StrikeGrid::is_valid_step(OptionKind kind, int step_percent) {
    const auto& steps = kind == OptionKind::Call ? call_steps() : put_steps();
    return std::find(steps.begin(), steps.end(), step_percent) != steps.end();
}

void RateTable::set(OptionKind kind, int step_percent, int maturity_days, double rate) {
    if (!StrikeGrid::is_valid_step(kind, step_percent))
        throw DataError("rate table: step " + std::to_string(step_percent) +
                        "% is not on the " + kind_name(kind) + " grid");
    if (maturity_days < StrikeGrid::min_maturity_days ||
        maturity_days > StrikeGrid::max_maturity_days)
        throw DataError("rate table: maturity " + std::to_string(maturity_days) +
                        " outside [7, 90]");
    if (!(rate > 0)) throw DataError("rate table: rates must be positive");
    cells_[{static_cast<int>(kind), step_percent}][maturity_days] = rate;
}

double RateTable::rate(OptionKind kind, int step_percent, int maturity_days,
                       bool* interpolated) const {
    if (interpolated) *interpolated = false;
    auto it = cells_.find({static_cast<int>(kind), step_percent});
    if (it == cells_.end() || it->second.empty())
        throw DataError("rate table: no rates for " + kind_name(kind) + " step " +
                        std::to_string(step_percent) + "%");
    const auto& by_mat = it->second;
    auto exact = by_mat.find(maturity_days);
    if (exact != by_mat.end()) return exact->second;

    auto hi = by_mat.lower_bound(maturity_days);
    if (hi == by_mat.begin() || hi == by_mat.end())
        throw DataError("rate table: maturity " + std::to_string(maturity_days) +
                        " outside the listed bucket range for " + kind_name(kind) +
                        " step " + std::to_string(step_percent) + "%");
    auto lo = std::prev(hi);
    const double w = static_cast<double>(maturity_days - lo->first) /
                     static_cast<double>(hi->first - lo->first);
    if (interpolated) *interpolated = true;
    return lo->second + w * (hi->second - lo->second);
}

RateTable RateTable::load(const std::string& path) {
    CsvReader csv(path);
    const std::size_t c_kind = csv.column("kind");
    const std::size_t c_step = csv.column("step_percent");
    const std::size_t c_mat = csv.column("maturity_days");
    const std::size_t c_rate = csv.column("rate");
    RateTable t;
    for (std::size_t i = 0; i < csv.row_count(); ++i) {
        const std::string& kind = csv.cell(i, c_kind);
        OptionKind k;
        if (kind == "call") k = OptionKind::Call;
        else if (kind == "put") k = OptionKind::Put;
        else
            throw DataError(path + ":" + std::to_string(csv.line_of(i)) +
                            ": unknown kind '" + kind + "'");
        t.set(k, static_cast<int>(csv.cell_double(i, c_step)),
              static_cast<int>(csv.cell_double(i, c_mat)), csv.cell_double(i, c_rate));
    }
    return t;
}

void RateTable::save(const std::string& path) const {
    std::ostringstream out;
    out << "kind,step_percent,maturity_days,rate\n";
    for (const auto& [key, by_mat] : cells_) {
        for (const auto& [mat, rate] : by_mat) {
            out << kind_name(static_cast<OptionKind>(key.first)) << ',' << key.second
                << ',' << mat << ',' << format_double(rate) << '\n';
        }
    }
    write_text_file(path, out.str());
}

RateTable RateTable::calibrate(const std::vector<OptionTrade>& trades,
                               bool strip_settlement_fee) {
    std::map<std::tuple<int, int, int>, std::vector<double>> samples;
    for (const auto& t : trades) {
        if (!(t.premium_paid > 0)) continue;
        const int step = validate_trade_against_grid(t);
        ImpliedRate v = implied_rate(t);
        double rate = v.rate;
        if (strip_settlement_fee) {
            const double r_s =
                t.type == MoneynessType::ATM ? kSettlementRateAtm : kSettlementRateOtm;
            rate /= 1.0 + r_s;
        }
        samples[{static_cast<int>(t.kind), step, t.maturity_days}].push_back(rate);
    }
    RateTable table;
    for (auto& [key, v] : samples) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        const double median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        if (median > 0)
            table.set(static_cast<OptionKind>(std::get<0>(key)), std::get<1>(key),
                      std::get<2>(key), median);
    }
    if (table.empty()) throw DataError("rate calibration: no usable trades");
    return table;
}

QuoteResult quote(const RateTable& table, double spot, OptionKind kind,
                  int step_percent, int maturity_days, double amount) {
    if (!(spot > 0)) throw DataError("quote: spot must be > 0");
    if (!(amount > 0)) throw DataError("quote: amount must be > 0");
    if (!StrikeGrid::is_valid_step(kind, step_percent))
        throw DataError("quote: step " + std::to_string(step_percent) +
                        "% is not on the " + kind_name(kind) + " grid");
    if (maturity_days < StrikeGrid::min_maturity_days ||
        maturity_days > StrikeGrid::max_maturity_days)
        throw DataError("quote: maturity " + std::to_string(maturity_days) +
                        " outside [7, 90]");
    QuoteResult q;
    const double v = table.rate(kind, step_percent, maturity_days, &q.rate_interpolated);
    q.premium_per_contract = v * spot;
    q.moneyness = step_percent == 100 ? MoneynessType::ATM : MoneynessType::OTM;
    const double r_s =
        q.moneyness == MoneynessType::ATM ? kSettlementRateAtm : kSettlementRateOtm;
    q.settlement_fee = amount * q.premium_per_contract * r_s;
    q.total_cost = amount * q.premium_per_contract + q.settlement_fee;
    return q;
}

int validate_trade_against_grid(const OptionTrade& trade) {
    const double ratio = trade.strike / trade.spot_at_trade;
    const auto& steps =
        trade.kind == OptionKind::Call ? StrikeGrid::call_steps() : StrikeGrid::put_steps();
    int nearest = steps.front();
    double nearest_err = 1e300;
    for (int step : steps) {
        const double target = step / 100.0;
        const double err = std::fabs(ratio - target) / target;
        if (err <= kGridTol) return step;
        if (err < nearest_err) {
            nearest_err = err;
            nearest = step;
        }
    }
    throw DataError("trade " + trade.trade_id + ": strike/spot ratio " +
                    format_double(ratio) + " is off the " + kind_name(trade.kind) +
                    " grid (nearest step " + std::to_string(nearest) + "%)");
}

ImpliedRate implied_rate(const OptionTrade& trade) {
    if (!(trade.amount > 0)) throw DataError("implied_rate: amount must be > 0");
    if (!(trade.spot_at_trade > 0)) throw DataError("implied_rate: spot must be > 0");
    if (trade.premium_paid < 0) throw DataError("implied_rate: negative premium");
    ImpliedRate r;
    r.rate = (trade.premium_paid / trade.amount) / trade.spot_at_trade;
    r.suspicious = trade.premium_paid == 0;
    return r;
}

} // namespace optbench

#include "optbench/mispricing.hpp"

#include "optbench/errors.hpp"
#include "optbench/pricing.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

namespace optbench {

MispricingOutput compute_mispricing(const std::vector<OptionTrade>& trades,
                                    const VolatilityPath& vol_path,
                                    const ReturnSeries& underlying_returns,
                                    const MispricingConfig& config) {
    std::map<Date, std::pair<double, double>> by_date; // date -> (return, volume)
    for (const auto& o : underlying_returns.obs)
        by_date[o.date] = {o.ret_pct, o.volume};

    MispricingOutput out;
    out.rows.reserve(trades.size());
    for (const auto& t : trades) {
        if (!(t.amount > 0)) {
            out.exclusions.push_back("trade " + t.trade_id + ": non-positive amount");
            continue;
        }
        const double observed = t.premium_paid / t.amount;
        if (!(observed > 0)) {
            out.exclusions.push_back("trade " + t.trade_id +
                                     ": zero per-contract quote, excluded");
            continue;
        }
        const double sigma = vol_path.sigma_at(t.trade_date); // throws on missing day
        auto rv = by_date.find(t.trade_date);
        if (rv == by_date.end())
            throw DataError("compute_mispricing: no underlying return/volume for " +
                            format_date(t.trade_date));

        MispricingRow row;
        row.trade_id = t.trade_id;
        row.underlying = t.underlying;
        row.date = t.trade_date;
        row.timestamp = t.timestamp;
        row.kind = t.kind;
        row.type = t.type;
        row.amount = t.amount;
        row.strike = t.strike;
        row.maturity_days = t.maturity_days;
        row.underlying_return = rv->second.first;
        row.volume = rv->second.second;
        row.volatility = sigma;
        row.kind_dummy = t.kind == OptionKind::Call ? 1 : 0;
        row.type_dummy = t.type == MoneynessType::ATM ? 1 : 0;

        PricingInput in;
        in.spot = t.spot_at_trade;
        in.strike = t.strike;
        in.rate = config.risk_free_rate;
        in.maturity = t.maturity_days / config.days_per_year;
        in.sigma = sigma;
        row.benchmark = bs_price(in, t.kind);
        row.observed = observed;
        row.delta_price = (row.benchmark - observed) / observed;

        const ArbitrageBand band = arbitrage_band(in, t.kind);
        if (observed > band.lower && observed < band.upper) {
            try {
                row.iv = implied_vol(observed, in, t.kind);
                row.iv_available = true;
                row.iv_gap = row.iv - sigma;
            } catch (const EstimationError&) {
                row.iv_available = false;
            }
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

Design build_design(const std::vector<MispricingRow>& rows) {
    // Column layout mirrors the regression table: intercept, six continuous
    // regressors, two dummies.
    Design d;
    d.names = {"Intercept", "Amount", "Strike",     "Maturity", "Return",
               "Volume",    "Volatility", "Kind",   "Type"};

    struct Raw {
        std::size_t idx;
        std::array<double, 6> cont;
        int kind_dummy;
        int type_dummy;
        double y;
    };
    std::vector<Raw> kept;
    kept.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const MispricingRow& r = rows[i];
        // Logs apply to Amount, Strike, Maturity, Volume only; Return can be
        // negative and Volatility is already scale-stable.
        if (!(r.amount > 0) || !(r.strike > 0) || !(r.maturity_days > 0) ||
            !(r.volume > 0)) {
            d.exclusions.push_back("trade " + r.trade_id +
                                   ": non-positive value before log transform");
            continue;
        }
        Raw raw;
        raw.idx = i;
        raw.cont = {std::log(r.amount), std::log(r.strike), std::log(r.maturity_days),
                    r.underlying_return, std::log(r.volume), r.volatility};
        raw.kind_dummy = r.kind_dummy;
        raw.type_dummy = r.type_dummy;
        raw.y = r.delta_price;
        kept.push_back(raw);
    }
    const std::size_t n = kept.size();
    if (n < d.names.size())
        throw DataError("build_design: too few usable rows (" + std::to_string(n) + ")");

    // Standardize the six continuous columns: mean 0, sample std 1.
    std::array<double, 6> mean{}, sd{};
    for (int c = 0; c < 6; ++c) {
        double s = 0;
        for (const auto& r : kept) s += r.cont[c];
        mean[c] = s / static_cast<double>(n);
        double v = 0;
        for (const auto& r : kept) v += (r.cont[c] - mean[c]) * (r.cont[c] - mean[c]);
        v /= static_cast<double>(n - 1);
        // relative threshold: a numerically constant column leaves O(eps^2)
        // rounding residue after centering, which must still count as zero
        if (!(v > 1e-20 * (1.0 + mean[c] * mean[c])))
            throw EstimationError("build_design: zero-variance regressor '" +
                                  d.names[1 + c] + "'");
        sd[c] = std::sqrt(v);
    }

    d.X.resize(n, 9);
    d.y.resize(n);
    d.row_indices.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.X(i, 0) = 1.0;
        for (int c = 0; c < 6; ++c) d.X(i, 1 + c) = (kept[i].cont[c] - mean[c]) / sd[c];
        d.X(i, 7) = kept[i].kind_dummy;
        d.X(i, 8) = kept[i].type_dummy;
        d.y(i) = kept[i].y;
        d.row_indices.push_back(kept[i].idx);
    }
    return d;
}

IvGapReport iv_gap_report(const std::vector<MispricingRow>& rows) {
    std::map<std::pair<std::string, int>, std::vector<double>> buckets;
    for (const auto& r : rows) {
        buckets[{r.underlying, static_cast<int>(r.kind)}]; // observe the group
        if (r.iv_available)
            buckets[{r.underlying, static_cast<int>(r.kind)}].push_back(r.iv_gap);
    }
    IvGapReport report;
    for (auto& [key, gaps] : buckets) {
        if (gaps.empty()) {
            report.notes.push_back(key.first + " " +
                                   kind_name(static_cast<OptionKind>(key.second)) +
                                   ": no rows with available IV; bucket omitted");
            continue;
        }
        IvGapBucket b;
        b.underlying = key.first;
        b.kind = static_cast<OptionKind>(key.second);
        b.stats = summarize(gaps);
        report.buckets.push_back(std::move(b));
    }
    return report;
}

std::map<std::string, int> expected_sign_targets(const std::string& underlying) {
    std::string lower;
    for (char c : underlying) lower.push_back(static_cast<char>(std::tolower(c)));
    std::map<std::string, int> signs;
    if (lower.find("btc") != std::string::npos) {
        signs["Amount"] = +1;
        signs["Volume"] = -1;
        signs["Strike"] = +1;
        signs["Maturity"] = +1;
        signs["Volatility"] = +1;
        signs["Kind"] = -1;
    } else if (lower.find("eth") != std::string::npos) {
        signs["Amount"] = +1;
        signs["Volume"] = -1;
        signs["Kind"] = +1;
    }
    return signs;
}

} // namespace optbench

#pragma once

#include "optbench/garch.hpp"
#include "optbench/market_data.hpp"
#include "optbench/regression.hpp"

#include <map>
#include <string>
#include <vector>

namespace optbench {

struct MispricingRow {
    std::string trade_id;
    std::string underlying;
    Date date = 0;
    std::string timestamp;
    OptionKind kind = OptionKind::Call;
    MoneynessType type = MoneynessType::OTM;

    double benchmark = 0;      ///< BS price per contract
    double observed = 0;       ///< Hegic quote per contract, premium_paid / amount
    double delta_price = 0;    ///< (benchmark - observed) / observed

    // raw regressors
    double amount = 0;
    double strike = 0;
    double maturity_days = 0;
    double underlying_return = 0; ///< same-day return, percent
    double volume = 0;            ///< same-day underlying volume
    double volatility = 0;        ///< annualized sigma_t used for the benchmark
    int kind_dummy = 0;           ///< call = 1
    int type_dummy = 0;           ///< ATM = 1

    double iv = 0;            ///< implied volatility, valid iff iv_available
    bool iv_available = false;
    double iv_gap = 0;        ///< iv - volatility, valid iff iv_available
};

struct MispricingConfig {
    double risk_free_rate = 0.0;
    double days_per_year = 365.0;
};

struct MispricingOutput {
    std::vector<MispricingRow> rows;
    std::vector<std::string> exclusions; ///< logged reasons (zero quotes etc.)
};

/// Benchmark every trade with the day's annualized sigma, attach Delta-price
/// and IV where the premium sits inside the arbitrage band.
/// The return series supplies the same-day Return and Volume regressors.
MispricingOutput compute_mispricing(const std::vector<OptionTrade>& trades,
                                    const VolatilityPath& vol_path,
                                    const ReturnSeries& underlying_returns,
                                    const MispricingConfig& config = {});

struct Design {
    Eigen::MatrixXd X;              ///< intercept + standardized regressors + dummies
    Eigen::VectorXd y;              ///< Delta-price response
    std::vector<std::string> names; ///< column names, names[0] == "Intercept"
    std::vector<std::size_t> row_indices; ///< rows kept, into the input vector
    std::vector<std::string> exclusions;  ///< rows dropped before logging, with reason
};

/// Natural logs on Amount, Strike, Maturity, Volume; all six continuous
/// regressors centered and scaled to unit sample standard deviation; dummies
/// untouched; intercept prepended. Zero-variance continuous regressors raise
/// EstimationError naming the column.
Design build_design(const std::vector<MispricingRow>& rows);

struct IvGapBucket {
    std::string underlying;
    OptionKind kind = OptionKind::Call;
    SummaryStats stats;
};

struct IvGapReport {
    std::vector<IvGapBucket> buckets;
    std::vector<std::string> notes; ///< omitted empty buckets
};

/// Summary of IV - sigma_t per (underlying, kind) over rows with available IV.
IvGapReport iv_gap_report(const std::vector<MispricingRow>& rows);

/// Documented coefficient-sign targets for the two studied underlyings;
/// empty for anything else. Used by the optional sign-comparison block of
/// the regression report.
std::map<std::string, int> expected_sign_targets(const std::string& underlying);

} // namespace optbench

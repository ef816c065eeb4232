#pragma once

#include "optbench/garch.hpp"
#include "optbench/market_data.hpp"
#include "optbench/regime.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace optbench {

struct AssetConfig {
    std::string name;
    std::string price_file;
    std::string trade_file;
    int ar_order = 8;
};

struct PipelineConfig {
    std::vector<AssetConfig> assets;
    GarchGrid garch_grid{2, 1, 2}; ///< pipeline default; full grid available
    double annualization_factor = 365.0;
    double risk_free_rate = 0.0;
    int hac_bandwidth = -1; ///< -1: automatic rule
    std::string rate_table_file;    ///< empty: calibrate from trades
    bool calibrate_rate_table = true;
    bool strip_settlement_fee = false;
    std::string output_dir = "out";
    std::uint64_t seed = 42;
    std::size_t msar_starts = 8;
    std::size_t diagnostic_lags = 10;
    bool use_log_returns = false;
    bool compare_signs = false; ///< emit the coefficient-sign comparison block

    /// Load from a JSON file; relative data paths resolve against the
    /// config file's directory. Unresolvable paths raise ConfigError.
    static PipelineConfig load(const std::string& path);
};

/// Stage names in execution order.
const std::vector<std::string>& pipeline_stages();

/// Run one named stage for every configured asset; earlier-stage outputs
/// must already exist in output_dir.
void run_stage(const PipelineConfig& config, const std::string& stage, bool verbose);

/// ingest -> fit-regimes -> fit-garch -> vol-path -> mispricing -> regress,
/// then writes the manifest. On failure a partial manifest is still written
/// and the error propagates with the stage name attached.
void run_pipeline(const PipelineConfig& config, bool verbose);

/// Synthetic two-regime fixture (prices, trades, config.json) for smoke and
/// determinism runs.
void generate_fixture(const std::string& out_dir, std::uint64_t seed);

} // namespace optbench

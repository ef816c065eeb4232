#include "optbench/amm.hpp"
#include "optbench/errors.hpp"
#include "optbench/pipeline.hpp"
#include "optbench/pricing.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

namespace {

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const optbench::ConfigError*>(&e)) return 2;
    if (dynamic_cast<const optbench::DataError*>(&e)) return 3;
    if (dynamic_cast<const optbench::EstimationError*>(&e)) return 4;
    return 1;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"optbench: regime-aware option pricing benchmark pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string stage_name;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool out_set = false;
    bool verbose = false;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", config_path, "pipeline config (JSON)");
        if (needs_config) c->required();
        cmd->add_option("--seed", seed, "master RNG seed override")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--out", out_dir, "output directory override")
            ->each([&](const std::string&) { out_set = true; });
        cmd->add_flag("--verbose", verbose, "progress on stderr");
    };

    auto* run = app.add_subcommand("run", "run every stage in order");
    add_common(run, true);
    run->add_option("--stage", stage_name, "run a single named stage instead");

    for (const auto& st : optbench::pipeline_stages()) {
        auto* cmd = app.add_subcommand(st, "run the '" + st + "' stage");
        add_common(cmd, true);
    }

    // price: standalone option pricer / implied-vol probe
    auto* price = app.add_subcommand("price", "price one option and report the band");
    double p_spot = 0, p_strike = 0, p_rate = 0, p_mat = 0, p_sigma = 0, p_premium = -1;
    std::string p_kind = "call";
    price->add_option("--spot", p_spot, "spot price")->required();
    price->add_option("--strike", p_strike, "strike")->required();
    price->add_option("--rate", p_rate, "continuously compounded risk-free rate")
        ->default_val(0.0);
    price->add_option("--maturity-days", p_mat, "maturity in days")->required();
    price->add_option("--sigma", p_sigma, "annualized volatility")->required();
    price->add_option("--kind", p_kind, "call|put")->default_val("call");
    price->add_option("--premium", p_premium,
                      "observed premium: also report implied volatility");

    // quote: AMM-style quote from a rate table
    auto* quote_cmd = app.add_subcommand("quote", "protocol-style quote from a rate table");
    std::string q_table, q_kind = "call";
    double q_spot = 0, q_amount = 1;
    int q_step = 100, q_mat = 30;
    quote_cmd->add_option("--rate-table", q_table, "rate table CSV")->required();
    quote_cmd->add_option("--spot", q_spot, "spot price")->required();
    quote_cmd->add_option("--kind", q_kind, "call|put")->default_val("call");
    quote_cmd->add_option("--step", q_step, "strike step, percent of spot")
        ->default_val(100);
    quote_cmd->add_option("--maturity-days", q_mat, "maturity in days")->default_val(30);
    quote_cmd->add_option("--amount", q_amount, "contract amount")->default_val(1.0);

    auto* gen = app.add_subcommand("gen-fixture", "write a synthetic dataset + config");
    std::string g_dir = "fixture";
    std::uint64_t g_seed = 42;
    gen->add_option("--out", g_dir, "target directory")->default_val("fixture");
    gen->add_option("--seed", g_seed, "fixture RNG seed")->default_val(42);

    CLI11_PARSE(app, argc, argv);

    try {
        auto load_cfg = [&]() {
            optbench::PipelineConfig cfg = optbench::PipelineConfig::load(config_path);
            if (seed_set) cfg.seed = seed;
            if (out_set) cfg.output_dir = out_dir;
            return cfg;
        };

        if (run->parsed()) {
            const auto cfg = load_cfg();
            if (!stage_name.empty())
                optbench::run_stage(cfg, stage_name, verbose);
            else
                optbench::run_pipeline(cfg, verbose);
            return 0;
        }
        for (const auto& st : optbench::pipeline_stages()) {
            if (app.get_subcommand(st)->parsed()) {
                optbench::run_stage(load_cfg(), st, verbose);
                return 0;
            }
        }
        if (price->parsed()) {
            if (p_kind != "call" && p_kind != "put")
                throw optbench::ConfigError("--kind must be call or put");
            const auto kind = p_kind == "call" ? optbench::OptionKind::Call
                                               : optbench::OptionKind::Put;
            optbench::PricingInput in{p_spot, p_strike, p_rate, p_mat / 365.0, p_sigma};
            const double px = optbench::bs_price(in, kind);
            const auto band = optbench::arbitrage_band(in, kind);
            std::cout << "price: " << fmt(px) << "\nband: [" << fmt(band.lower) << ", "
                      << fmt(band.upper) << "]\n"
                      << "parity_gap: " << fmt(optbench::put_call_parity_gap(in)) << "\n";
            if (p_premium >= 0) {
                const double iv = optbench::implied_vol(p_premium, in, kind);
                std::cout << "implied_vol: " << fmt(iv) << "\n";
            }
            return 0;
        }
        if (quote_cmd->parsed()) {
            if (q_kind != "call" && q_kind != "put")
                throw optbench::ConfigError("--kind must be call or put");
            const auto kind = q_kind == "call" ? optbench::OptionKind::Call
                                               : optbench::OptionKind::Put;
            const auto table = optbench::RateTable::load(q_table);
            const auto q = optbench::quote(table, q_spot, kind, q_step, q_mat, q_amount);
            std::cout << "premium_per_contract: " << fmt(q.premium_per_contract)
                      << "\nsettlement_fee: " << fmt(q.settlement_fee)
                      << "\ntotal_cost: " << fmt(q.total_cost) << "\nmoneyness: "
                      << (q.moneyness == optbench::MoneynessType::ATM ? "ATM" : "OTM")
                      << "\nrate_interpolated: " << (q.rate_interpolated ? 1 : 0)
                      << "\n";
            return 0;
        }
        if (gen->parsed()) {
            optbench::generate_fixture(g_dir, g_seed);
            std::cout << "fixture written to " << g_dir << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}

#include "optbench/pipeline.hpp"

#include "optbench/amm.hpp"
#include "optbench/csv.hpp"
#include "optbench/errors.hpp"
#include "optbench/mispricing.hpp"
#include "optbench/pricing.hpp"
#include "optbench/regression.hpp"
#include "optbench/rng.hpp"
#include "optbench/sim.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace optbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string out_path(const PipelineConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
}

std::string returns_file(const AssetConfig& a) { return a.name + "_returns.csv"; }
std::string labels_file(const AssetConfig& a) { return a.name + "_regime_labels.csv"; }
std::string garch_file(const AssetConfig& a, int regime) {
    return a.name + "_garch_regime" + std::to_string(regime) + ".json";
}
std::string volpath_file(const AssetConfig& a) { return a.name + "_volpath.csv"; }
std::string mispricing_file(const AssetConfig& a) { return a.name + "_mispricing.csv"; }

ReturnSeries read_returns(const std::string& path, const std::string& asset) {
    CsvReader csv(path);
    const std::size_t c_date = csv.column("date");
    const std::size_t c_ret = csv.column("return_pct");
    const std::size_t c_vol = csv.column("volume");
    ReturnSeries s;
    s.asset = asset;
    for (std::size_t i = 0; i < csv.row_count(); ++i) {
        ReturnObs o;
        o.date = parse_date(csv.cell(i, c_date));
        o.ret_pct = csv.cell_double(i, c_ret);
        o.volume = csv.cell_double(i, c_vol);
        s.obs.push_back(o);
    }
    return s;
}

RegimeLabels read_labels(const std::string& path) {
    CsvReader csv(path);
    const std::size_t c_date = csv.column("date");
    const std::size_t c_label = csv.column("label");
    const std::size_t c_high = csv.column("high_volatility_regime");
    const std::size_t c_d0 = csv.column("expected_duration_0");
    const std::size_t c_d1 = csv.column("expected_duration_1");
    RegimeLabels out;
    for (std::size_t i = 0; i < csv.row_count(); ++i) {
        out.dates.push_back(parse_date(csv.cell(i, c_date)));
        const std::string& lab = csv.cell(i, c_label);
        if (lab == "uncertain") out.labels.push_back(kRegimeUncertain);
        else if (lab == "0") out.labels.push_back(0);
        else if (lab == "1") out.labels.push_back(1);
        else throw DataError(path + ": unknown regime label '" + lab + "'");
        if (i == 0) {
            out.high_volatility_regime = static_cast<int>(csv.cell_double(i, c_high));
            out.expected_duration[0] = csv.cell_double(i, c_d0);
            out.expected_duration[1] = csv.cell_double(i, c_d1);
        }
    }
    return out;
}

VolatilityPath read_volpath(const std::string& path) {
    CsvReader csv(path);
    const std::size_t c_date = csv.column("date");
    const std::size_t c_sigma = csv.column("sigma_annualized");
    const std::size_t c_regime = csv.column("regime");
    VolatilityPath vp;
    for (std::size_t i = 0; i < csv.row_count(); ++i) {
        VolPoint p;
        p.date = parse_date(csv.cell(i, c_date));
        p.sigma_annualized = csv.cell_double(i, c_sigma);
        p.regime = static_cast<int>(csv.cell_double(i, c_regime));
        vp.points.push_back(p);
    }
    return vp;
}

json garch_fit_to_json(const GarchFit& f, const std::vector<Date>& dates) {
    json j;
    j["spec"] = {{"p", f.spec.p}, {"o", f.spec.o}, {"q", f.spec.q}};
    j["params"] = {{"mu", f.params.mu},       {"omega", f.params.omega},
                   {"alpha", f.params.alpha}, {"gamma", f.params.gamma},
                   {"beta", f.params.beta},   {"eta", f.params.eta},
                   {"lambda", f.params.lambda}};
    j["std_errors"] = f.std_errors;
    j["loglik"] = f.loglik;
    j["aic"] = f.aic;
    j["bic"] = f.bic;
    j["stationary"] = f.stationary;
    j["persistence"] = f.persistence;
    j["diagnostics"] = {{"ljung_box_stat", f.ljung_box_stat},
                        {"ljung_box_p", f.ljung_box_p},
                        {"arch_stat", f.arch_stat},
                        {"arch_p", f.arch_p}};
    j["sigma2"] = f.sigma2;
    std::vector<std::string> ds;
    ds.reserve(dates.size());
    for (Date d : dates) ds.push_back(format_date(d));
    j["dates"] = ds;
    return j;
}

GarchFit garch_fit_from_json(const json& j) {
    GarchFit f;
    f.spec.p = j.at("spec").at("p").get<int>();
    f.spec.o = j.at("spec").at("o").get<int>();
    f.spec.q = j.at("spec").at("q").get<int>();
    const auto& p = j.at("params");
    f.params.mu = p.at("mu").get<double>();
    f.params.omega = p.at("omega").get<double>();
    f.params.alpha = p.at("alpha").get<std::vector<double>>();
    f.params.gamma = p.at("gamma").get<std::vector<double>>();
    f.params.beta = p.at("beta").get<std::vector<double>>();
    f.params.eta = p.at("eta").get<double>();
    f.params.lambda = p.at("lambda").get<double>();
    f.loglik = j.at("loglik").get<double>();
    f.aic = j.at("aic").get<double>();
    f.bic = j.at("bic").get<double>();
    f.stationary = j.at("stationary").get<bool>();
    f.persistence = j.at("persistence").get<double>();
    f.sigma2 = j.at("sigma2").get<std::vector<double>>();
    f.converged = true;
    return f;
}

void append_manifest(const PipelineConfig&, std::vector<std::string>& manifest,
                     const std::string& name) {
    manifest.push_back(name);
}

// Rethrow with the stage name prefixed, preserving the exception type so the
// CLI exit-code mapping still works.
[[noreturn]] void rethrow_with_stage(const std::string& stage) {
    const std::string prefix = "stage " + stage + ": ";
    try {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const DataError& e) {
        throw DataError(prefix + e.what());
    } catch (const EstimationError& e) {
        throw EstimationError(prefix + e.what());
    } catch (const std::exception& e) {
        throw DataError(prefix + e.what());
    }
}

void write_manifest(const PipelineConfig& cfg, const std::vector<std::string>& files,
                    bool complete) {
    std::ostringstream out;
    out << "status: " << (complete ? "complete" : "partial") << "\n";
    for (const auto& f : files) out << f << "\n";
    write_text_file(out_path(cfg, "manifest.txt"), out.str());
}

// ---------------------------------------------------------------- stages

void stage_ingest(const PipelineConfig& cfg, const AssetConfig& asset,
                  std::vector<std::string>& manifest) {
    const auto prices = load_prices(asset.price_file);
    const ReturnSeries series =
        compute_returns(prices, asset.name, cfg.use_log_returns);

    std::ostringstream rcsv;
    rcsv << "date,return_pct,volume\n";
    for (const auto& o : series.obs)
        rcsv << format_date(o.date) << ',' << format_double(o.ret_pct) << ','
             << format_double(o.volume) << '\n';
    write_text_file(out_path(cfg, returns_file(asset)), rcsv.str());
    append_manifest(cfg, manifest, returns_file(asset));

    const SummaryStats st = describe(series);
    std::ostringstream rep;
    rep << "asset: " << asset.name << "\n"
        << "returns: " << (cfg.use_log_returns ? "log" : "simple") << " (percent)\n"
        << "observations: " << st.n << "\n"
        << "mean: " << fmt(st.mean) << "\nstd: " << fmt(st.stddev) << "\nmin: "
        << fmt(st.min) << "\nq25: " << fmt(st.q25) << "\nq50: " << fmt(st.q50)
        << "\nq75: " << fmt(st.q75) << "\nmax: " << fmt(st.max) << "\nskewness: "
        << fmt(st.skewness) << "\nkurtosis: " << fmt(st.kurtosis) << "\n";

    const auto trades = load_trades(asset.trade_file);
    std::size_t calls = 0, puts = 0, atm_calls = 0, atm_puts = 0;
    std::vector<double> premia, amounts;
    for (const auto& t : trades) {
        validate_trade_against_grid(t);
        if (t.kind == OptionKind::Call) {
            ++calls;
            if (t.type == MoneynessType::ATM) ++atm_calls;
        } else {
            ++puts;
            if (t.type == MoneynessType::ATM) ++atm_puts;
        }
        premia.push_back(t.premium_paid);
        amounts.push_back(t.amount);
    }
    rep << "trades: " << trades.size() << "\ncalls: " << calls << " (ATM " << atm_calls
        << ")\nputs: " << puts << " (ATM " << atm_puts << ")\n";
    if (!trades.empty()) {
        const SummaryStats pr = summarize(premia);
        const SummaryStats am = summarize(amounts);
        rep << "premium_mean: " << fmt(pr.mean) << "\npremium_std: " << fmt(pr.stddev)
            << "\namount_mean: " << fmt(am.mean) << "\namount_std: " << fmt(am.stddev)
            << "\n";
    }
    write_text_file(out_path(cfg, asset.name + "_descriptive.txt"), rep.str());
    append_manifest(cfg, manifest, asset.name + "_descriptive.txt");

    if (cfg.rate_table_file.empty() && cfg.calibrate_rate_table && !trades.empty()) {
        const RateTable table = RateTable::calibrate(trades, cfg.strip_settlement_fee);
        table.save(out_path(cfg, asset.name + "_rate_table.csv"));
        append_manifest(cfg, manifest, asset.name + "_rate_table.csv");
    }
}

void stage_fit_regimes(const PipelineConfig& cfg, const AssetConfig& asset,
                       std::vector<std::string>& manifest) {
    const ReturnSeries series =
        read_returns(out_path(cfg, returns_file(asset)), asset.name);
    MsArFitOptions opts;
    opts.starts = cfg.msar_starts;
    const MsArFit fit = fit_msar(series, MsArSpec{asset.ar_order},
                                 substream_seed(cfg.seed, "fit-regimes:" + asset.name),
                                 opts);
    const RegimeLabels labels = classify(fit);

    // Report: parameters with robust standard errors, transition matrix,
    // durations, information criteria.
    std::ostringstream rep;
    rep << "asset: " << asset.name << "\nmodel: two-regime MS-AR(" << asset.ar_order
        << ")\nobservations: " << fit.n_obs << "\nparameters: " << fit.n_params
        << "\nloglik: " << fmt(fit.loglik) << "\naic: " << fmt(fit.aic)
        << "\nbic: " << fmt(fit.bic) << "\n";
    const int a = asset.ar_order;
    for (int s = 0; s < 2; ++s) {
        const std::size_t base = static_cast<std::size_t>(s) * (a + 2);
        rep << "regime " << s << ":\n";
        rep << "  name: "
            << (labels.high_volatility_regime == s ? "high-volatility" : "low-volatility")
            << "\n";
        rep << "  mu: " << fmt(fit.params.mu[s]) << " (se " << fmt(fit.std_errors[base])
            << ")\n";
        for (int i = 0; i < a; ++i)
            rep << "  phi" << i + 1 << ": " << fmt(fit.params.phi[s][i]) << " (se "
                << fmt(fit.std_errors[base + 1 + i]) << ")\n";
        rep << "  sigma2: " << fmt(fit.params.sigma2[s]) << " (se "
            << fmt(fit.std_errors[base + 1 + a]) << ")\n";
        rep << "  expected_duration_days: " << fmt(labels.expected_duration[s]) << "\n";
    }
    const std::size_t kp = fit.std_errors.size();
    rep << "p00: " << fmt(fit.params.p00) << " (se " << fmt(fit.std_errors[kp - 2])
        << ")\n";
    rep << "p10: " << fmt(1.0 - fit.params.p11) << " (se " << fmt(fit.std_errors[kp - 1])
        << ")\n";
    rep << "transition_matrix: [[" << fmt(fit.params.p00) << ", "
        << fmt(1.0 - fit.params.p00) << "], [" << fmt(1.0 - fit.params.p11) << ", "
        << fmt(fit.params.p11) << "]]\n";
    rep << "std_error_note: sandwich (OPG/observed-information) estimator\n";
    write_text_file(out_path(cfg, asset.name + "_msar_report.txt"), rep.str());
    append_manifest(cfg, manifest, asset.name + "_msar_report.txt");

    std::ostringstream probs;
    probs << "date,p_regime0\n";
    for (std::size_t i = 0; i < fit.smoothed.size(); ++i)
        probs << format_date(fit.dates[i]) << ',' << format_double(fit.smoothed[i][0])
              << '\n';
    write_text_file(out_path(cfg, asset.name + "_smoothed_probs.csv"), probs.str());
    append_manifest(cfg, manifest, asset.name + "_smoothed_probs.csv");

    std::ostringstream labcsv;
    labcsv << "date,label,high_volatility_regime,expected_duration_0,expected_duration_1\n";
    for (std::size_t i = 0; i < labels.dates.size(); ++i) {
        const int lab = labels.labels[i];
        labcsv << format_date(labels.dates[i]) << ','
               << (lab == kRegimeUncertain ? std::string("uncertain") : std::to_string(lab))
               << ',' << labels.high_volatility_regime << ','
               << format_double(labels.expected_duration[0]) << ','
               << format_double(labels.expected_duration[1]) << '\n';
    }
    write_text_file(out_path(cfg, labels_file(asset)), labcsv.str());
    append_manifest(cfg, manifest, labels_file(asset));
}

void stage_fit_garch(const PipelineConfig& cfg, const AssetConfig& asset,
                     std::vector<std::string>& manifest) {
    const ReturnSeries series =
        read_returns(out_path(cfg, returns_file(asset)), asset.name);
    const RegimeLabels labels = read_labels(out_path(cfg, labels_file(asset)));

    std::map<Date, double> ret_by_date, vol_by_date;
    for (const auto& o : series.obs) {
        ret_by_date[o.date] = o.ret_pct;
        vol_by_date[o.date] = o.volume;
    }

    std::ostringstream rep;
    rep << "asset: " << asset.name << "\n";
    for (int regime = 0; regime < 2; ++regime) {
        // Regime subsample: labeled days concatenated in time order, the
        // recursion running across joins as if contiguous.
        ReturnSeries sub;
        sub.asset = asset.name;
        std::vector<Date> dates;
        for (std::size_t i = 0; i < labels.dates.size(); ++i) {
            if (labels.labels[i] != regime) continue;
            auto it = ret_by_date.find(labels.dates[i]);
            if (it == ret_by_date.end())
                throw DataError("fit-garch: regime label on " +
                                format_date(labels.dates[i]) + " has no return");
            sub.obs.push_back({labels.dates[i], it->second, vol_by_date[labels.dates[i]]});
            dates.push_back(labels.dates[i]);
        }
        GarchFitOptions opts;
        opts.diagnostic_lags = cfg.diagnostic_lags;
        const BicSelection sel = select_by_bic(
            sub, substream_seed(cfg.seed, "fit-garch:" + asset.name + ":" +
                                              std::to_string(regime)),
            cfg.garch_grid, opts);

        json j = garch_fit_to_json(sel.fit, dates);
        std::ofstream jf(out_path(cfg, garch_file(asset, regime)));
        jf << j.dump(2) << '\n';
        append_manifest(cfg, manifest, garch_file(asset, regime));

        const GarchFit& f = sel.fit;
        rep << "regime " << regime << ":\n"
            << "  name: "
            << (labels.high_volatility_regime == regime ? "high-volatility"
                                                        : "low-volatility")
            << "\n  observations: " << sub.obs.size() << "\n  spec: "
            << (f.spec.o > 0 ? "GJR-GARCH(" : "GARCH(") << f.spec.p << ","
            << (f.spec.o > 0 ? std::to_string(f.spec.o) + "," : "") << f.spec.q << ")\n"
            << "  grid_fits_tried: " << sel.fits_tried
            << "\n  grid_fits_admissible: " << sel.fits_admissible << "\n"
            << "  loglik: " << fmt(f.loglik) << "\n  aic: " << fmt(f.aic)
            << "\n  bic: " << fmt(f.bic) << "\n";
        const auto se = [&](std::size_t i) {
            return i < f.std_errors.size() ? fmt(f.std_errors[i]) : "nan";
        };
        std::size_t idx = 0;
        rep << "  mu: " << fmt(f.params.mu) << " (se " << se(idx++) << ")\n";
        rep << "  omega: " << fmt(f.params.omega) << " (se " << se(idx++) << ")\n";
        for (int i = 0; i < f.spec.p; ++i)
            rep << "  alpha" << i + 1 << ": " << fmt(f.params.alpha[i]) << " (se "
                << se(idx++) << ")\n";
        for (int i = 0; i < f.spec.o; ++i)
            rep << "  gamma" << i + 1 << ": " << fmt(f.params.gamma[i]) << " (se "
                << se(idx++) << ")\n";
        for (int i = 0; i < f.spec.q; ++i)
            rep << "  beta" << i + 1 << ": " << fmt(f.params.beta[i]) << " (se "
                << se(idx++) << ")\n";
        rep << "  eta: " << fmt(f.params.eta) << " (se " << se(idx++) << ")\n";
        rep << "  lambda: " << fmt(f.params.lambda) << " (se " << se(idx++) << ")\n";
        rep << "  persistence: " << fmt(f.persistence) << "\n";
        rep << "  ljung_box: " << fmt(f.ljung_box_stat) << " (p " << fmt(f.ljung_box_p)
            << ")\n";
        rep << "  engle_arch: " << fmt(f.arch_stat) << " (p " << fmt(f.arch_p) << ")\n";
        rep << "  diagnostic_lags: " << cfg.diagnostic_lags << "\n";
    }
    write_text_file(out_path(cfg, asset.name + "_garch_report.txt"), rep.str());
    append_manifest(cfg, manifest, asset.name + "_garch_report.txt");
}

void stage_vol_path(const PipelineConfig& cfg, const AssetConfig& asset,
                    std::vector<std::string>& manifest) {
    const ReturnSeries series =
        read_returns(out_path(cfg, returns_file(asset)), asset.name);
    const RegimeLabels labels = read_labels(out_path(cfg, labels_file(asset)));
    std::array<GarchFit, 2> fits;
    for (int regime = 0; regime < 2; ++regime) {
        std::ifstream jf(out_path(cfg, garch_file(asset, regime)));
        if (!jf)
            throw DataError("vol-path: missing " + out_path(cfg, garch_file(asset, regime)));
        json j;
        jf >> j;
        fits[regime] = garch_fit_from_json(j);
    }
    const VolatilityPath vp = build_vol_path(labels, fits, cfg.annualization_factor);
    std::ostringstream out;
    out << "date,sigma_annualized,regime\n";
    for (const auto& p : vp.points)
        out << format_date(p.date) << ',' << format_double(p.sigma_annualized) << ','
            << p.regime << '\n';
    write_text_file(out_path(cfg, volpath_file(asset)), out.str());
    append_manifest(cfg, manifest, volpath_file(asset));

    const auto realized = rolling_realized_vol(series, 7, cfg.annualization_factor);
    std::ostringstream rout;
    rout << "date,sigma_annualized\n";
    for (const auto& p : realized)
        rout << format_date(p.date) << ',' << format_double(p.sigma_annualized) << '\n';
    write_text_file(out_path(cfg, asset.name + "_realized_vol.csv"), rout.str());
    append_manifest(cfg, manifest, asset.name + "_realized_vol.csv");
}

void stage_mispricing(const PipelineConfig& cfg, const AssetConfig& asset,
                      std::vector<std::string>& manifest) {
    const auto trades = load_trades(asset.trade_file);
    const VolatilityPath vp = read_volpath(out_path(cfg, volpath_file(asset)));
    const ReturnSeries series =
        read_returns(out_path(cfg, returns_file(asset)), asset.name);
    MispricingConfig mcfg;
    mcfg.risk_free_rate = cfg.risk_free_rate;
    mcfg.days_per_year = cfg.annualization_factor;
    const MispricingOutput mp = compute_mispricing(trades, vp, series, mcfg);

    std::ostringstream out;
    out << "trade_id,underlying,date,timestamp,kind,type,benchmark,observed,delta_price,"
           "amount,strike,maturity_days,return,volume,volatility,kind_dummy,type_dummy,"
           "iv,iv_available,iv_gap\n";
    for (const auto& r : mp.rows) {
        out << r.trade_id << ',' << r.underlying << ',' << format_date(r.date) << ','
            << r.timestamp << ',' << kind_name(r.kind) << ',' << type_name(r.type) << ','
            << format_double(r.benchmark) << ',' << format_double(r.observed) << ','
            << format_double(r.delta_price) << ',' << format_double(r.amount) << ','
            << format_double(r.strike) << ',' << format_double(r.maturity_days) << ','
            << format_double(r.underlying_return) << ',' << format_double(r.volume)
            << ',' << format_double(r.volatility) << ',' << r.kind_dummy << ','
            << r.type_dummy << ',' << (r.iv_available ? format_double(r.iv) : "nan")
            << ',' << (r.iv_available ? 1 : 0) << ','
            << (r.iv_available ? format_double(r.iv_gap) : "nan") << '\n';
    }
    write_text_file(out_path(cfg, mispricing_file(asset)), out.str());
    append_manifest(cfg, manifest, mispricing_file(asset));

    // Plot-ready series by strike.
    std::ostringstream dps, ivs;
    dps << "strike,kind,type,delta_price\n";
    ivs << "strike,kind,type,iv_gap\n";
    for (const auto& r : mp.rows) {
        dps << format_double(r.strike) << ',' << kind_name(r.kind) << ','
            << type_name(r.type) << ',' << format_double(r.delta_price) << '\n';
        if (r.iv_available)
            ivs << format_double(r.strike) << ',' << kind_name(r.kind) << ','
                << type_name(r.type) << ',' << format_double(r.iv_gap) << '\n';
    }
    write_text_file(out_path(cfg, asset.name + "_dprice_by_strike.csv"), dps.str());
    append_manifest(cfg, manifest, asset.name + "_dprice_by_strike.csv");
    write_text_file(out_path(cfg, asset.name + "_ivgap_by_strike.csv"), ivs.str());
    append_manifest(cfg, manifest, asset.name + "_ivgap_by_strike.csv");

    const IvGapReport gap = iv_gap_report(mp.rows);
    std::ostringstream grep;
    grep << "asset: " << asset.name << "\nrisk_free_rate: " << fmt(cfg.risk_free_rate)
         << "\n";
    for (const auto& b : gap.buckets) {
        grep << "bucket " << b.underlying << " " << kind_name(b.kind) << ":\n"
             << "  n: " << b.stats.n << "\n  mean: " << fmt(b.stats.mean)
             << "\n  std: " << fmt(b.stats.stddev) << "\n  min: " << fmt(b.stats.min)
             << "\n  q25: " << fmt(b.stats.q25) << "\n  q50: " << fmt(b.stats.q50)
             << "\n  q75: " << fmt(b.stats.q75) << "\n  max: " << fmt(b.stats.max)
             << "\n  skewness: " << fmt(b.stats.skewness)
             << "\n  kurtosis: " << fmt(b.stats.kurtosis) << "\n";
    }
    for (const auto& note : gap.notes) grep << "note: " << note << "\n";
    for (const auto& ex : mp.exclusions) grep << "excluded: " << ex << "\n";
    write_text_file(out_path(cfg, asset.name + "_ivgap_report.txt"), grep.str());
    append_manifest(cfg, manifest, asset.name + "_ivgap_report.txt");
}

std::vector<MispricingRow> read_mispricing_rows(const std::string& path) {
    CsvReader csv(path);
    std::vector<MispricingRow> rows;
    for (std::size_t i = 0; i < csv.row_count(); ++i) {
        MispricingRow r;
        r.trade_id = csv.cell(i, csv.column("trade_id"));
        r.underlying = csv.cell(i, csv.column("underlying"));
        r.date = parse_date(csv.cell(i, csv.column("date")));
        r.timestamp = csv.cell(i, csv.column("timestamp"));
        r.kind = csv.cell(i, csv.column("kind")) == "call" ? OptionKind::Call
                                                           : OptionKind::Put;
        r.type = csv.cell(i, csv.column("type")) == "ATM" ? MoneynessType::ATM
                                                          : MoneynessType::OTM;
        r.benchmark = csv.cell_double(i, csv.column("benchmark"));
        r.observed = csv.cell_double(i, csv.column("observed"));
        r.delta_price = csv.cell_double(i, csv.column("delta_price"));
        r.amount = csv.cell_double(i, csv.column("amount"));
        r.strike = csv.cell_double(i, csv.column("strike"));
        r.maturity_days = csv.cell_double(i, csv.column("maturity_days"));
        r.underlying_return = csv.cell_double(i, csv.column("return"));
        r.volume = csv.cell_double(i, csv.column("volume"));
        r.volatility = csv.cell_double(i, csv.column("volatility"));
        r.kind_dummy = static_cast<int>(csv.cell_double(i, csv.column("kind_dummy")));
        r.type_dummy = static_cast<int>(csv.cell_double(i, csv.column("type_dummy")));
        r.iv_available = csv.cell(i, csv.column("iv_available")) == "1";
        if (r.iv_available) {
            r.iv = csv.cell_double(i, csv.column("iv"));
            r.iv_gap = csv.cell_double(i, csv.column("iv_gap"));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void stage_regress(const PipelineConfig& cfg, const AssetConfig& asset,
                   std::vector<std::string>& manifest) {
    auto rows = read_mispricing_rows(out_path(cfg, mispricing_file(asset)));
    // HAC ordering: trade timestamp ascending, ties by trade id.
    std::stable_sort(rows.begin(), rows.end(),
                     [](const MispricingRow& a, const MispricingRow& b) {
                         if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                         return a.trade_id < b.trade_id;
                     });
    const Design design = build_design(rows);
    FglsOptions fopts;
    fopts.hac_bandwidth = cfg.hac_bandwidth;
    const RegressionResult res = fit_fgls(design.X, design.y, fopts);

    std::ostringstream rep;
    rep << "asset: " << asset.name << "\nresponse: delta_price\n"
        << "risk_free_rate: " << fmt(cfg.risk_free_rate)
        << " (config scalar; flagged: source not identified by the benchmark)\n"
        << "volatility_regressor: annualized sigma_t (the pricing input)\n"
        << "observations: " << design.X.rows() << "\nexcluded_rows: "
        << design.exclusions.size() << "\nhac_bandwidth: " << res.hac_bandwidth_used
        << "\nomega_floor_count: " << res.n_floored << "\n";
    if (res.degenerate_weights)
        rep << "warning: all fitted variances at the floor (degenerate weights)\n";
    rep << "coefficients (FGLS, HAC standard errors, two-sided p):\n";
    for (Eigen::Index j = 0; j < res.beta.size(); ++j)
        rep << "  " << design.names[j] << ": " << fmt(res.beta(j)) << " (se "
            << fmt(res.hac_se(j)) << ", p " << fmt(res.p_values(j)) << ")\n";
    rep << "aux_coefficients:\n";
    for (Eigen::Index j = 0; j < res.gamma_aux.size(); ++j)
        rep << "  " << design.names[j] << ": " << fmt(res.gamma_aux(j)) << "\n";
    rep << "diagnostics:\n"
        << "  adj_r2: " << fmt(res.adj_r2) << "\n  r2: " << fmt(res.r2)
        << "\n  f_stat: " << fmt(res.f_stat) << "\n  f_p: " << fmt(res.f_p)
        << "\n  wald_stat: " << fmt(res.wald_stat) << "\n  wald_p: " << fmt(res.wald_p)
        << "\n  condition_number: " << fmt(res.condition_number) << "\n";
    rep << "vif:\n";
    for (std::size_t j = 0; j < res.vif.size(); ++j)
        rep << "  " << design.names[j] << ": " << fmt(res.vif[j]) << "\n";
    for (const auto& ex : design.exclusions) rep << "excluded: " << ex << "\n";

    if (cfg.compare_signs) {
        const auto targets = expected_sign_targets(asset.name);
        rep << "sign_comparison (documented targets, no numeric tolerance):\n";
        if (targets.empty()) {
            rep << "  note: no documented targets for underlying '" << asset.name
                << "'\n";
        } else {
            for (const auto& [name, sign] : targets) {
                const auto it =
                    std::find(design.names.begin(), design.names.end(), name);
                if (it == design.names.end()) continue;
                const Eigen::Index j = it - design.names.begin();
                const int got = res.beta(j) > 0 ? 1 : -1;
                rep << "  " << name << ": expected " << (sign > 0 ? "+" : "-")
                    << ", estimated " << (got > 0 ? "+" : "-") << " -> "
                    << (got == sign ? "match" : "SIGN MISMATCH") << "\n";
            }
        }
    }
    write_text_file(out_path(cfg, asset.name + "_fgls_report.txt"), rep.str());
    append_manifest(cfg, manifest, asset.name + "_fgls_report.txt");
}

using StageFn = void (*)(const PipelineConfig&, const AssetConfig&,
                         std::vector<std::string>&);

StageFn stage_fn(const std::string& stage) {
    if (stage == "ingest") return &stage_ingest;
    if (stage == "fit-regimes") return &stage_fit_regimes;
    if (stage == "fit-garch") return &stage_fit_garch;
    if (stage == "vol-path") return &stage_vol_path;
    if (stage == "mispricing") return &stage_mispricing;
    if (stage == "regress") return &stage_regress;
    throw ConfigError("unknown stage '" + stage + "'");
}

} // namespace

const std::vector<std::string>& pipeline_stages() {
    static const std::vector<std::string> stages = {
        "ingest", "fit-regimes", "fit-garch", "vol-path", "mispricing", "regress"};
    return stages;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty()) return p;
        fs::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    PipelineConfig cfg;
    try {
        for (const auto& a : j.at("assets")) {
            AssetConfig ac;
            ac.name = a.at("name").get<std::string>();
            ac.price_file = resolve(a.at("price_file").get<std::string>());
            ac.trade_file = resolve(a.at("trade_file").get<std::string>());
            ac.ar_order = a.value("ar_order", 8);
            cfg.assets.push_back(std::move(ac));
        }
        if (j.contains("garch_grid")) {
            cfg.garch_grid.p_max = j["garch_grid"].value("p_max", 2);
            cfg.garch_grid.o_max = j["garch_grid"].value("o_max", 1);
            cfg.garch_grid.q_max = j["garch_grid"].value("q_max", 2);
        }
        cfg.annualization_factor = j.value("annualization_factor", 365.0);
        cfg.risk_free_rate = j.value("risk_free_rate", 0.0);
        cfg.hac_bandwidth = j.value("hac_bandwidth", -1);
        cfg.rate_table_file = resolve(j.value("rate_table", std::string()));
        cfg.calibrate_rate_table = j.value("calibrate_rate_table", true);
        cfg.strip_settlement_fee = j.value("strip_settlement_fee", false);
        cfg.output_dir = resolve(j.value("output_dir", std::string("out")));
        cfg.seed = j.value("seed", 42u);
        cfg.msar_starts = j.value("msar_starts", std::size_t{8});
        cfg.diagnostic_lags = j.value("diagnostic_lags", std::size_t{10});
        cfg.use_log_returns = j.value("use_log_returns", false);
        cfg.compare_signs = j.value("compare_signs", false);
    } catch (const json::exception& e) {
        throw ConfigError("config field error in " + path + ": " + e.what());
    }
    if (cfg.assets.empty()) throw ConfigError("config lists no assets");
    if (cfg.garch_grid.p_max < 1 || cfg.garch_grid.p_max > 10 ||
        cfg.garch_grid.q_max < 1 || cfg.garch_grid.q_max > 10 ||
        cfg.garch_grid.o_max < 0 || cfg.garch_grid.o_max > 5)
        throw ConfigError("garch_grid bounds must satisfy p,q in 1..10, o in 0..5");
    for (const auto& a : cfg.assets) {
        if (!fs::exists(a.price_file))
            throw ConfigError("price file not resolvable: " + a.price_file);
        if (!fs::exists(a.trade_file))
            throw ConfigError("trade file not resolvable: " + a.trade_file);
    }
    if (!cfg.rate_table_file.empty() && !fs::exists(cfg.rate_table_file))
        throw ConfigError("rate table not resolvable: " + cfg.rate_table_file);
    return cfg;
}

void run_stage(const PipelineConfig& cfg, const std::string& stage, bool verbose) {
    fs::create_directories(cfg.output_dir);
    StageFn fn = stage_fn(stage);
    std::vector<std::string> manifest;
    for (const auto& asset : cfg.assets) {
        if (verbose)
            std::cerr << "[" << stage << "] " << asset.name << "\n";
        fn(cfg, asset, manifest);
    }
}

void run_pipeline(const PipelineConfig& cfg, bool verbose) {
    fs::create_directories(cfg.output_dir);
    std::vector<std::string> manifest;
    for (const auto& stage : pipeline_stages()) {
        for (const auto& asset : cfg.assets) {
            if (verbose)
                std::cerr << "[" << stage << "] " << asset.name << "\n";
            try {
                stage_fn(stage)(cfg, asset, manifest);
            } catch (...) {
                write_manifest(cfg, manifest, false);
                rethrow_with_stage(stage);
            }
        }
    }
    write_manifest(cfg, manifest, true);
}

void generate_fixture(const std::string& out_dir, std::uint64_t seed) {
    fs::create_directories(out_dir);
    auto rng = substream(seed, "fixture");

    // Two-regime AR(1) daily returns, distinct variances.
    MsArParams truth;
    truth.mu = {0.05, -0.1};
    truth.phi[0] = {0.1};
    truth.phi[1] = {-0.05};
    truth.sigma2 = {1.0, 16.0};
    truth.p00 = 0.96;
    truth.p11 = 0.92;
    MsArSimulation sim = simulate_msar(truth, 1400, rng);

    const Date start = make_date(2021, 1, 1);
    std::lognormal_distribution<double> vol_dist(10.0, 0.5);
    std::vector<PricePoint> prices;
    double close = 30000.0;
    prices.push_back({start, close, vol_dist(rng)});
    for (std::size_t t = 0; t < sim.returns.size(); ++t) {
        close *= 1.0 + sim.returns[t] / 100.0;
        prices.push_back({start + static_cast<Date>(t + 1), close, vol_dist(rng)});
    }
    std::ostringstream pcsv;
    pcsv << "date,close,volume\n";
    for (const auto& p : prices)
        pcsv << format_date(p.date) << ',' << format_double(p.close) << ','
             << format_double(p.volume) << '\n';
    write_text_file((fs::path(out_dir) / "prices_synt.csv").string(), pcsv.str());

    // Trades on the quote grid over the second half of the calendar.
    const std::vector<int> maturities = {7, 10, 14, 21, 30, 45, 60, 90};
    std::uniform_int_distribution<std::size_t> day_pick(prices.size() / 2,
                                                        prices.size() - 2);
    std::uniform_int_distribution<int> mat_pick(0, static_cast<int>(maturities.size()) - 1);
    std::uniform_int_distribution<int> step_pick(0, 3);
    std::uniform_int_distribution<int> kind_pick(0, 1);
    std::lognormal_distribution<double> amount_dist(0.0, 1.0);
    std::lognormal_distribution<double> rate_noise(0.0, 0.25);

    std::ostringstream tcsv;
    tcsv << "trade_id,underlying,kind,type,strike,maturity_days,amount,premium_paid,"
            "spot,timestamp\n";
    const int n_trades = 320;
    for (int i = 0; i < n_trades; ++i) {
        const std::size_t day = day_pick(rng);
        const bool call = kind_pick(rng) == 0;
        const int step = call ? StrikeGrid::call_steps()[step_pick(rng)]
                              : StrikeGrid::put_steps()[step_pick(rng)];
        const int mat = maturities[mat_pick(rng)];
        const double spot = prices[day].close;
        const double strike = spot * step / 100.0;
        const double amount = std::max(0.01, amount_dist(rng));
        // Synthetic rate schedule: maturity-sloped base rate, cheaper away
        // from the money, with multiplicative noise in the filled premium.
        const double dist = std::abs(step - 100) / 100.0;
        const double v = 0.04 * std::sqrt(mat / 30.0) * std::exp(-2.0 * dist);
        const double premium = amount * v * spot * rate_noise(rng);
        tcsv << "T" << i << ",syntbtc," << (call ? "call" : "put") << ','
             << (step == 100 ? "ATM" : "OTM") << ',' << format_double(strike) << ','
             << mat << ',' << format_double(amount) << ',' << format_double(premium)
             << ',' << format_double(spot) << ',' << format_date(prices[day].date)
             << "T12:00:00Z\n";
    }
    write_text_file((fs::path(out_dir) / "trades_synt.csv").string(), tcsv.str());

    json cfg;
    cfg["assets"] = json::array({json{{"name", "syntbtc"},
                                      {"price_file", "prices_synt.csv"},
                                      {"trade_file", "trades_synt.csv"},
                                      {"ar_order", 1}}});
    cfg["garch_grid"] = {{"p_max", 1}, {"o_max", 1}, {"q_max", 1}};
    cfg["annualization_factor"] = 365.0;
    cfg["risk_free_rate"] = 0.0;
    cfg["hac_bandwidth"] = -1;
    cfg["calibrate_rate_table"] = true;
    cfg["output_dir"] = "out";
    cfg["seed"] = seed;
    cfg["msar_starts"] = 4;
    cfg["diagnostic_lags"] = 10;
    cfg["compare_signs"] = true;
    std::ofstream cf((fs::path(out_dir) / "config.json").string());
    cf << cfg.dump(2) << '\n';
}

} // namespace optbench

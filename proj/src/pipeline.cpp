#include "fwstack/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "fwstack/detail/parallel.hpp"
#include "fwstack/detail/rng.hpp"
#include "fwstack/errors.hpp"
#include "fwstack/ingestion.hpp"

namespace fwstack {

namespace fs = std::filesystem;

std::vector<std::string> RunConfig::default_train_regions() {
    // The paper's training list names France twice; the distinct entries are
    // config defaults, not hardcoded truths.
    return {"Australia", "Algeria", "Brazil",  "France",  "Germany", "India",
            "Italy",     "Japan",   "Kenya",   "Mexico",  "Poland",  "Russia",
            "South Africa", "Turkey", "US",    "Peru",    "Lebanon", "Chile",
            "Bangladesh", "United Kingdom"};
}

std::vector<std::string> RunConfig::default_holdout_regions() {
    // Canada appears twice in the printed held-out list; kept once here.
    return {"Saudi Arabia", "Canada", "Portugal", "Egypt", "Belgium", "Netherlands", "Sweden"};
}

RunConfig::RunConfig()
    : train_regions(default_train_regions()), holdout_regions(default_holdout_regions()) {}

void RunConfig::validate() const {
    if (horizons.empty()) throw ConfigError("at least one horizon is required");
    for (int h : horizons)
        if (h != 7 && h != 14) throw ConfigError("horizons must be 7 or 14, got " + std::to_string(h));
    if (n_runs < 1) throw ConfigError("n_runs must be >= 1");
    if (stride < 1) throw ConfigError("stride must be >= 1");
    if (smooth_window < 1) throw ConfigError("smooth_window must be >= 1");
    if (train_regions.empty()) throw ConfigError("train_regions must not be empty");
    if (holdout_regions.empty()) throw ConfigError("holdout_regions must not be empty");
    std::set<std::string> train(train_regions.begin(), train_regions.end());
    for (const auto& r : holdout_regions)
        if (train.count(r)) throw ConfigError("region in both train and holdout lists: " + r);
    if (!snapshot_path.empty() && !synthetic_path.empty())
        throw ConfigError("choose either a snapshot or a synthetic spec file, not both");
}

std::array<ForecastKind, 2> select_base_pair(const std::array<double, 4>& mean_smape) {
    std::array<std::size_t, 4> order = {0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mean_smape[a] < mean_smape[b]; });
    return {static_cast<ForecastKind>(order[0]), static_cast<ForecastKind>(order[1])};
}

std::array<MetaFeature, 2> select_feature_pair(const ScoreTable& table) {
    std::array<std::size_t, 4> order = {0, 1, 2, 3};
    std::array<double, 4> mean_abs{};
    for (std::size_t f = 0; f < 4; ++f) mean_abs[f] = table.column_mean_abs(static_cast<MetaFeature>(f));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mean_abs[a] > mean_abs[b]; });
    return {static_cast<MetaFeature>(order[0]), static_cast<MetaFeature>(order[1])};
}

PreparedRegion prepare_region(const TimeSeries& raw, const RunConfig& config) {
    PreparedRegion out{raw, raw, raw, {}, false};
    for (std::size_t i = 1; i < raw.size(); ++i)
        if (raw[i] < raw[i - 1]) {
            out.monotonicity_warning = true;
            break;
        }
    TimeSeries cleaned = (config.repair_monotonic && out.monotonicity_warning) ? repair_monotonicity(raw) : raw;
    out.box_cox = estimate_lambda(cleaned);
    out.transformed = box_cox(cleaned, out.box_cox);
    out.working = moving_average(out.transformed, config.smooth_window);
    return out;
}

namespace {

constexpr std::uint64_t kTagLstmTrain = 0x11;
constexpr std::uint64_t kTagLstmHoldout = 0x22;
constexpr std::uint64_t kTagMlpFw = 0x33;
constexpr std::uint64_t kTagMlpStack = 0x44;

struct StaticWindow {
    std::string region;
    std::size_t region_index = 0;
    std::size_t window_index = 0;
    std::optional<SplitSet> splits;
    MetaFeatureVector features_a, features_b;
    std::array<std::vector<double>, 4> d_fc, e_fc;
    std::vector<double> d_target, e_target;
    bool ok = true;
    std::string error;
};

std::vector<double> first_n(const std::vector<double>& v, std::size_t n) {
    return {v.begin(), v.begin() + static_cast<long>(n)};
}

// Deterministic base-model forecasts and features for every training window
// of one horizon. LSTM slots stay empty until each run fills them.
std::vector<StaticWindow> build_static_windows(const std::vector<PreparedRegion>& regions,
                                               int horizon, const RunConfig& config) {
    std::vector<StaticWindow> windows;
    for (std::size_t ri = 0; ri < regions.size(); ++ri) {
        auto splits = split(regions[ri].working, horizon, config.stride);
        for (std::size_t wi = 0; wi < splits.size(); ++wi) {
            StaticWindow w;
            w.region = regions[ri].working.region_id();
            w.region_index = ri;
            w.window_index = wi;
            w.splits = splits[wi];
            windows.push_back(std::move(w));
        }
    }

    detail::parallel_for(windows.size(), config.jobs, [&](std::size_t i) {
        StaticWindow& w = windows[i];
        const SplitSet& s = *w.splits;
        try {
            w.features_a = extract(s.window_a, config.features);
            w.features_b = extract(s.window_b, config.features);
            w.d_target = first_n(s.window_b.values(), static_cast<std::size_t>(horizon));
            w.e_target = s.window_c.values();
            for (ForecastKind kind : {ForecastKind::Arima, ForecastKind::HoltWinters, ForecastKind::ProphetTrend}) {
                ForecasterOptions fo{config.lstm, config.prophet_changepoints};
                auto model_a = fit_forecaster(kind, s.window_a, fo, 0);
                auto model_b = fit_forecaster(kind, s.window_b, fo, 0);
                w.d_fc[static_cast<std::size_t>(kind)] = model_a->predict(horizon);
                w.e_fc[static_cast<std::size_t>(kind)] = model_b->predict(horizon);
            }
        } catch (const std::exception& e) {
            w.ok = false;
            w.error = e.what();
        }
    });
    return windows;
}

struct HoldoutStatic {
    std::string region;
    std::optional<SplitSet> final_split;
    MetaFeatureVector features_b;
    std::vector<double> target;
    std::array<std::vector<double>, 4> e_fc; // deterministic kinds pre-filled
    bool ok = true;
    std::string error;
};

std::vector<HoldoutStatic> build_holdout_static(const std::vector<PreparedRegion>& regions,
                                                int horizon, const RunConfig& config) {
    std::vector<HoldoutStatic> out(regions.size());
    detail::parallel_for(regions.size(), config.jobs, [&](std::size_t i) {
        HoldoutStatic& h = out[i];
        h.region = regions[i].working.region_id();
        try {
            auto splits = split(regions[i].working, horizon, config.stride);
            h.final_split = splits.back();
            h.features_b = extract(h.final_split->window_b, config.features);
            h.target = h.final_split->window_c.values();
            for (ForecastKind kind : {ForecastKind::Arima, ForecastKind::HoltWinters, ForecastKind::ProphetTrend}) {
                ForecasterOptions fo{config.lstm, config.prophet_changepoints};
                auto model = fit_forecaster(kind, h.final_split->window_b, fo, 0);
                h.e_fc[static_cast<std::size_t>(kind)] = model->predict(horizon);
            }
        } catch (const std::exception& e) {
            h.ok = false;
            h.error = e.what();
        }
    });
    return out;
}

// Steps 1-4 for one (horizon, run): LSTM forecasts, selection, meta-learner
// training, and the holdout leaderboard row.
HorizonRunOutcome run_once(std::vector<StaticWindow> windows, std::vector<HoldoutStatic> holdout,
                           int horizon, int run, const RunConfig& config,
                           std::vector<WindowScore>& window_scores_out,
                           std::size_t& windows_failed_out) {
    const std::uint64_t run_seed = config.seed + static_cast<std::uint64_t>(run);
    const auto h = static_cast<std::size_t>(horizon);

    // Step 1 completion: the stochastic base model.
    detail::parallel_for(windows.size(), config.jobs, [&](std::size_t i) {
        StaticWindow& w = windows[i];
        if (!w.ok) return;
        try {
            const SplitSet& s = *w.splits;
            auto lstm_a = fit_lstm(s.window_a, config.lstm,
                                   detail::mix_seed(run_seed, h, kTagLstmTrain, w.region_index,
                                                    w.window_index, 0));
            auto lstm_b = fit_lstm(s.window_b, config.lstm,
                                   detail::mix_seed(run_seed, h, kTagLstmTrain, w.region_index,
                                                    w.window_index, 1));
            w.d_fc[3] = lstm_a.predict(horizon);
            w.e_fc[3] = lstm_b.predict(horizon);
        } catch (const std::exception& e) {
            w.ok = false;
            w.error = e.what();
        }
    });

    std::vector<const StaticWindow*> live;
    for (const auto& w : windows)
        if (w.ok) live.push_back(&w);
    windows_failed_out = windows.size() - live.size();
    if (windows_failed_out * 4 > windows.size())
        throw PipelineFailure("more than 25% of step-1 windows failed (horizon " +
                              std::to_string(horizon) + ", run " + std::to_string(run) + ")");
    if (live.size() < 3)
        throw PipelineFailure("fewer than 3 usable windows for selection");

    HorizonRunOutcome outcome;
    outcome.horizon = horizon;
    outcome.run = run;

    // Step 2: selection.
    std::array<double, 4> mean_smape{};
    std::vector<MetaFeatureVector> feats;
    std::array<std::vector<double>, 4> smape_columns;
    for (const StaticWindow* w : live) {
        feats.push_back(w->features_a);
        WindowScore ws;
        ws.region = w->region;
        ws.window_start = w->splits->window_a.start_date();
        ws.features_a = w->features_a;
        for (std::size_t k = 0; k < 4; ++k) {
            double s = smape(w->d_fc[k], w->d_target);
            smape_columns[k].push_back(s);
            mean_smape[k] += s / static_cast<double>(live.size());
            ws.d_smape[k] = s;
        }
        window_scores_out.push_back(std::move(ws));
    }
    std::vector<std::pair<std::string, std::vector<double>>> model_scores;
    for (std::size_t k = 0; k < 4; ++k)
        model_scores.emplace_back(to_string(static_cast<ForecastKind>(k)), smape_columns[k]);
    outcome.score_table = build_score_table(feats, model_scores);
    outcome.base_pair = select_base_pair(mean_smape);
    outcome.feature_pair = select_feature_pair(outcome.score_table);

    // Step 2: meta-learner training on the e-stage rows of the selected pair.
    std::vector<TrainRow> fw_rows, plain_rows;
    for (const StaticWindow* w : live) {
        const auto& f1 = w->e_fc[static_cast<std::size_t>(outcome.base_pair[0])];
        const auto& f2 = w->e_fc[static_cast<std::size_t>(outcome.base_pair[1])];
        double feat0 = w->features_b.get(outcome.feature_pair[0]);
        double feat1 = w->features_b.get(outcome.feature_pair[1]);
        for (std::size_t t = 0; t < f1.size(); ++t) {
            fw_rows.push_back({{f1[t], f2[t], feat0, feat1}, w->e_target[t]});
            plain_rows.push_back({{f1[t], f2[t]}, w->e_target[t]});
        }
    }
    outcome.fw_bundle.base_pair = outcome.base_pair;
    outcome.fw_bundle.feature_pair = outcome.feature_pair;
    outcome.fw_bundle.feature_weighted = true;
    outcome.fw_bundle.meta = train_meta_learner(fw_rows, config.mlp,
                                                detail::mix_seed(run_seed, h, kTagMlpFw));
    outcome.stacking_bundle.base_pair = outcome.base_pair;
    outcome.stacking_bundle.feature_pair = outcome.feature_pair;
    outcome.stacking_bundle.feature_weighted = false;
    outcome.stacking_bundle.meta = train_meta_learner(plain_rows, config.mlp,
                                                      detail::mix_seed(run_seed, h, kTagMlpStack));

    // Step 3: holdout forecasts of the selected pair (LSTM only if selected);
    // step 4 adds the remaining base models for the leaderboard rows.
    detail::parallel_for(holdout.size(), config.jobs, [&](std::size_t i) {
        HoldoutStatic& hs = holdout[i];
        if (!hs.ok) return;
        try {
            auto lstm = fit_lstm(hs.final_split->window_b, config.lstm,
                                 detail::mix_seed(run_seed, h, kTagLstmHoldout, i));
            hs.e_fc[3] = lstm.predict(horizon);
        } catch (const std::exception& e) {
            hs.ok = false;
            hs.error = e.what();
        }
    });

    std::size_t holdout_failed = 0;
    for (const auto& hs : holdout)
        if (!hs.ok) ++holdout_failed;
    if (holdout_failed * 4 > holdout.size())
        throw PipelineFailure("more than 25% of holdout regions failed");

    std::array<double, kNumMethods> sums{};
    std::size_t used = 0;
    for (const auto& hs : holdout) {
        if (!hs.ok) continue;
        HoldoutRegionResult rr;
        rr.region = hs.region;
        rr.target = hs.target;
        rr.features_b = hs.features_b;
        const auto& f1 = hs.e_fc[static_cast<std::size_t>(outcome.base_pair[0])];
        const auto& f2 = hs.e_fc[static_cast<std::size_t>(outcome.base_pair[1])];
        for (std::size_t k = 0; k < 4; ++k) rr.method_forecasts[k] = hs.e_fc[k];
        rr.method_forecasts[4] = model_average(f1, f2);
        rr.method_forecasts[5] = predict_ensemble(outcome.stacking_bundle, f1, f2, hs.features_b);
        rr.method_forecasts[6] = predict_ensemble(outcome.fw_bundle, f1, f2, hs.features_b);
        for (std::size_t m = 0; m < kNumMethods; ++m)
            sums[m] += smape(rr.method_forecasts[m], rr.target);
        outcome.regions.push_back(std::move(rr));
        ++used;
    }
    if (used == 0) throw PipelineFailure("no holdout regions survived");
    for (std::size_t m = 0; m < kNumMethods; ++m)
        outcome.method_smape[m] = sums[m] / static_cast<double>(used);
    return outcome;
}

LeakageAudit build_audit(const std::vector<FitRecord>& records,
                         const std::vector<std::string>& holdout_regions) {
    LeakageAudit audit;
    std::set<std::string> holdout(holdout_regions.begin(), holdout_regions.end());
    for (const auto& rec : records) {
        ++audit.fits_checked;
        bool is_training_stage = rec.stage == "step1-d" || rec.stage == "step1-e";
        if (is_training_stage && holdout.count(rec.region))
            audit.violations.push_back("holdout region " + rec.region + " used in " + rec.stage);
        // fit inputs must end strictly before the held-out target span
        if (rec.input_end >= rec.target_start)
            audit.violations.push_back("fit input for " + rec.region + " (" + rec.stage +
                                       ") overlaps its target span");
    }
    audit.pass = audit.violations.empty();
    return audit;
}

} // namespace

RunReport run_pipeline(const RunConfig& config) {
    config.validate();

    RunReport report;
    report.config = config;

    // Ingest.
    std::vector<TimeSeries> train_raw, holdout_raw;
    if (!config.synthetic_path.empty()) {
        report.data_source = config.synthetic_path;
        report.data_checksum = file_checksum(config.synthetic_path);
        auto specs = load_curve_specs(config.synthetic_path);
        auto find = [&](const std::string& id) -> const CurveSpec& {
            for (const auto& s : specs)
                if (s.region_id == id) return s;
            throw UnknownRegion("region '" + id + "' not present in the synthetic spec file");
        };
        for (const auto& id : config.train_regions) train_raw.push_back(generate(find(id)));
        for (const auto& id : config.holdout_regions) holdout_raw.push_back(generate(find(id)));
    } else if (!config.snapshot_path.empty()) {
        report.data_source = config.snapshot_path;
        report.data_checksum = file_checksum(config.snapshot_path);
        auto snap = load_snapshot(config.snapshot_path);
        for (const auto& id : config.train_regions) train_raw.push_back(country_series(snap, id));
        for (const auto& id : config.holdout_regions) holdout_raw.push_back(country_series(snap, id));
    } else {
        throw ConfigError("either snapshot or synthetic input is required");
    }

    std::vector<std::optional<PreparedRegion>> train_slots(train_raw.size());
    std::vector<std::optional<PreparedRegion>> holdout_slots(holdout_raw.size());
    detail::parallel_for(train_raw.size(), config.jobs,
                         [&](std::size_t i) { train_slots[i] = prepare_region(train_raw[i], config); });
    detail::parallel_for(holdout_raw.size(), config.jobs,
                         [&](std::size_t i) { holdout_slots[i] = prepare_region(holdout_raw[i], config); });
    std::vector<PreparedRegion> train_prepared, holdout_prepared;
    for (auto& slot : train_slots) train_prepared.push_back(std::move(*slot));
    for (auto& slot : holdout_slots) holdout_prepared.push_back(std::move(*slot));

    for (const auto& hp : holdout_prepared) {
        RunReport::HoldoutContext ctx{hp.original.region_id(), hp.original, hp.transformed, hp.box_cox, {}};
        report.holdout_context.push_back(std::move(ctx));
    }

    for (int horizon : config.horizons) {
        auto windows = build_static_windows(train_prepared, horizon, config);
        auto holdout_static = build_holdout_static(holdout_prepared, horizon, config);
        report.windows_total[horizon] = windows.size();

        for (const auto& w : windows) {
            if (!w.ok) continue;
            WindowScore ws;
            ws.region = w.region;
            ws.window_start = w.splits->window_a.start_date();
            ws.features_a = w.features_a;
            report.static_features[horizon].push_back(std::move(ws));
        }

        for (std::size_t i = 0; i < holdout_static.size(); ++i)
            if (holdout_static[i].ok)
                report.holdout_context[i].c_start[horizon] =
                    holdout_static[i].final_split->window_c.start_date();

        // Audit records: one per (window, stage); every model fit in that
        // stage shares the span.
        for (const auto& w : windows) {
            if (!w.ok) continue;
            const SplitSet& s = *w.splits;
            report.fit_records.push_back({w.region, "step1-d", s.window_a.start_date(),
                                          s.window_a.end_date(), s.window_b.start_date(),
                                          s.window_b.end_date()});
            report.fit_records.push_back({w.region, "step1-e", s.window_b.start_date(),
                                          s.window_b.end_date(), s.window_c.start_date(),
                                          s.window_c.end_date()});
        }
        for (const auto& hs : holdout_static) {
            if (!hs.ok) continue;
            const SplitSet& s = *hs.final_split;
            report.fit_records.push_back({hs.region, "step3", s.window_b.start_date(),
                                          s.window_b.end_date(), s.window_c.start_date(),
                                          s.window_c.end_date()});
            report.fit_records.push_back({hs.region, "step4", s.window_b.start_date(),
                                          s.window_b.end_date(), s.window_c.start_date(),
                                          s.window_c.end_date()});
        }

        std::size_t failed_max = 0;
        for (int run = 0; run < config.n_runs; ++run) {
            std::vector<WindowScore> scores;
            std::size_t failed = 0;
            auto outcome = run_once(windows, holdout_static, horizon, run, config, scores, failed);
            failed_max = std::max(failed_max, failed);
            report.window_scores[horizon].push_back(std::move(scores));
            report.runs[horizon].push_back(std::move(outcome));
        }
        report.windows_failed[horizon] = failed_max;

        // Across-run mean score table.
        ScoreTable mean_table = report.runs[horizon].front().score_table;
        for (std::size_t r = 0; r < mean_table.cells.size(); ++r)
            for (std::size_t c = 0; c < mean_table.cells[r].size(); ++c) {
                double acc = 0.0;
                for (const auto& outcome : report.runs[horizon])
                    acc += outcome.score_table.cells[r][c];
                mean_table.cells[r][c] = acc / static_cast<double>(report.runs[horizon].size());
            }
        report.mean_score_tables.emplace(horizon, std::move(mean_table));

        for (std::size_t m = 0; m < kNumMethods; ++m) {
            double acc = 0.0;
            for (const auto& outcome : report.runs[horizon]) acc += outcome.method_smape[m];
            report.leaderboard[m][horizon] = acc / static_cast<double>(report.runs[horizon].size());
        }
    }

    report.audit = build_audit(report.fit_records, config.holdout_regions);
    write_raw_report(report);
    return report;
}

// ---------------------------------------------------------------------------
// Raw files
// ---------------------------------------------------------------------------

namespace {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string sanitize(const std::string& region) {
    std::string out = region;
    for (char& c : out)
        if (c == ' ' || c == '/' || c == ',') c = '_';
    return out;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary); // LF newlines on every platform
    if (!out) throw UnreadableFile("cannot write " + path.string());
    return out;
}

} // namespace

void write_raw_report(const RunReport& report) {
    const RunConfig& config = report.config;
    fs::create_directories(config.out_dir);
    const fs::path dir(config.out_dir);

    // manifest
    {
        auto out = open_out(dir / "manifest.txt");
        out << "format=fwstack-run-v1\n";
        out << "data_source=" << report.data_source << "\n";
        char checksum[32];
        std::snprintf(checksum, sizeof(checksum), "%016llx",
                      static_cast<unsigned long long>(report.data_checksum));
        out << "data_checksum=" << checksum << "\n";
        out << "smape_space=transformed\n";
        std::string hs;
        for (std::size_t i = 0; i < config.horizons.size(); ++i)
            hs += (i ? "," : "") + std::to_string(config.horizons[i]);
        out << "horizons=" << hs << "\n";
        out << "seed=" << config.seed << "\n";
        out << "n_runs=" << config.n_runs << "\n";
        out << "stride=" << config.stride << "\n";
        out << "smooth_window=" << config.smooth_window << "\n";
        out << "repair_monotonic=" << (config.repair_monotonic ? "true" : "false") << "\n";
        out << "svd_order=" << config.features.svd_order << "\n";
        out << "svd_delay=" << config.features.svd_delay << "\n";
        out << "acf_lag=" << config.features.acf_lag << "\n";
        out << "prophet_changepoints=" << config.prophet_changepoints << "\n";
        std::string widths;
        for (std::size_t i = 0; i < config.lstm.widths.size(); ++i)
            widths += (i ? "," : "") + std::to_string(config.lstm.widths[i]);
        out << "lstm_widths=" << widths << "\n";
        out << "lstm_seq_len=" << config.lstm.seq_len << "\n";
        out << "lstm_batch=" << config.lstm.batch_size << "\n";
        out << "lstm_epochs=" << config.lstm.epochs << "\n";
        out << "lstm_lr=" << format_full(config.lstm.learning_rate) << "\n";
        out << "mlp_hidden=" << config.mlp.hidden_width << "\n";
        out << "mlp_epochs=" << config.mlp.epochs << "\n";
        out << "mlp_lr=" << format_full(config.mlp.learning_rate) << "\n";
        out << "mlp_batch=" << config.mlp.batch_size << "\n";
        out << "train_regions=" << join(config.train_regions, ",") << "\n";
        out << "holdout_regions=" << join(config.holdout_regions, ",") << "\n";
        out << "leakage_audit=" << (report.audit.pass ? "pass" : "FAIL") << "\n";
        out << "leakage_fits_checked=" << report.audit.fits_checked << "\n";
        for (const auto& v : report.audit.violations) out << "leakage_violation=" << v << "\n";
        for (const auto& [h, total] : report.windows_total) {
            out << "windows_total_h" << h << "=" << total << "\n";
            out << "windows_failed_h" << h << "=" << report.windows_failed.at(h) << "\n";
        }
    }

    // per-run leaderboard scores
    {
        auto out = open_out(dir / "raw_scores.tsv");
        out << "horizon\trun\tmethod\tsmape\n";
        for (const auto& [h, outcomes] : report.runs)
            for (const auto& outcome : outcomes)
                for (std::size_t m = 0; m < kNumMethods; ++m)
                    out << h << "\t" << outcome.run << "\t" << kMethodNames[m] << "\t"
                        << format_full(outcome.method_smape[m]) << "\n";
    }

    // per-run selections
    {
        auto out = open_out(dir / "selections.tsv");
        out << "horizon\trun\tbase_pair\tfeature_pair\n";
        for (const auto& [h, outcomes] : report.runs)
            for (const auto& outcome : outcomes)
                out << h << "\t" << outcome.run << "\t" << to_string(outcome.base_pair[0]) << "+"
                    << to_string(outcome.base_pair[1]) << "\t" << to_string(outcome.feature_pair[0])
                    << "+" << to_string(outcome.feature_pair[1]) << "\n";
    }

    // per-window features and scores
    for (const auto& [h, feats] : report.static_features) {
        auto out = open_out(dir / ("features_h" + std::to_string(h) + ".tsv"));
        out << "region\twindow_start\tcv\tsvde\tkpss\tacf1\n";
        for (const auto& ws : feats)
            out << ws.region << "\t" << to_iso(ws.window_start) << "\t" << format_full(ws.features_a.cv)
                << "\t" << format_full(ws.features_a.svd_entropy) << "\t"
                << format_full(ws.features_a.kpss) << "\t" << format_full(ws.features_a.acf1) << "\n";
    }
    for (const auto& [h, runs] : report.window_scores) {
        auto out = open_out(dir / ("window_scores_h" + std::to_string(h) + ".tsv"));
        out << "run\tregion\twindow_start\tmodel\tsmape\n";
        for (std::size_t r = 0; r < runs.size(); ++r)
            for (const auto& ws : runs[r])
                for (std::size_t k = 0; k < 4; ++k)
                    out << r << "\t" << ws.region << "\t" << to_iso(ws.window_start) << "\t"
                        << to_string(static_cast<ForecastKind>(k)) << "\t" << format_full(ws.d_smape[k])
                        << "\n";
    }

    // per-run holdout forecasts in the transformed (working) space; the
    // recomputation oracle and the report renderer both feed on these
    for (const auto& [h, outcomes] : report.runs) {
        auto out = open_out(dir / ("holdout_forecasts_h" + std::to_string(h) + ".tsv"));
        out << "run\tregion\tseries\tstep\tvalue\n";
        for (const auto& outcome : outcomes)
            for (const auto& rr : outcome.regions) {
                for (std::size_t t = 0; t < rr.target.size(); ++t)
                    out << outcome.run << "\t" << rr.region << "\ttarget\t" << t << "\t"
                        << format_full(rr.target[t]) << "\n";
                for (std::size_t m = 0; m < kNumMethods; ++m)
                    for (std::size_t t = 0; t < rr.method_forecasts[m].size(); ++t)
                        out << outcome.run << "\t" << rr.region << "\t" << kMethodNames[m] << "\t" << t
                            << "\t" << format_full(rr.method_forecasts[m][t]) << "\n";
            }
    }

    // ensemble bundles
    for (const auto& [h, outcomes] : report.runs)
        for (const auto& outcome : outcomes) {
            save_bundle(outcome.fw_bundle,
                        (dir / ("bundle_fw_h" + std::to_string(h) + "_run" + std::to_string(outcome.run) +
                                ".json")).string());
            save_bundle(outcome.stacking_bundle,
                        (dir / ("bundle_stack_h" + std::to_string(h) + "_run" +
                                std::to_string(outcome.run) + ".json")).string());
        }

    // per-region forecasts in original units (run-mean in the working space,
    // then unsmoothed and inverse Box-Cox transformed)
    for (const auto& [h, outcomes] : report.runs) {
        for (const auto& ctx : report.holdout_context) {
            if (!ctx.c_start.count(h)) continue;
            Days c_start = ctx.c_start.at(h);
            std::size_t c_index =
                static_cast<std::size_t>((c_start - ctx.original.start_date()).count());

            std::array<std::vector<double>, kNumMethods> mean_fc;
            std::size_t n_used = 0;
            for (const auto& outcome : outcomes) {
                for (const auto& rr : outcome.regions) {
                    if (rr.region != ctx.region) continue;
                    for (std::size_t m = 0; m < kNumMethods; ++m) {
                        if (mean_fc[m].empty()) mean_fc[m].assign(rr.method_forecasts[m].size(), 0.0);
                        for (std::size_t t = 0; t < rr.method_forecasts[m].size(); ++t)
                            mean_fc[m][t] += rr.method_forecasts[m][t];
                    }
                    ++n_used;
                }
            }
            if (n_used == 0) continue;
            for (auto& fc : mean_fc)
                for (double& v : fc) v /= static_cast<double>(n_used);

            // invert smoothing then Box-Cox; unrepresentable values become NA
            const int w = report.config.smooth_window;
            std::vector<double> tail;
            for (int k = w - 1; k >= 1; --k)
                tail.push_back(ctx.transformed[c_index - static_cast<std::size_t>(k)]);
            std::array<std::vector<std::string>, kNumMethods> cells;
            for (std::size_t m = 0; m < kNumMethods; ++m) {
                cells[m].assign(mean_fc[m].size(), "NA");
                try {
                    auto unsmoothed = invert_moving_average(mean_fc[m], tail, w);
                    TimeSeries tmp(ctx.region, c_start, unsmoothed, true);
                    auto original_units = box_cox_inverse(tmp, ctx.box_cox);
                    for (std::size_t t = 0; t < original_units.size(); ++t)
                        cells[m][t] = format_full(original_units[t]);
                } catch (const Error&) {
                    // out-of-domain forecast; keep NA cells
                }
            }

            auto out = open_out(dir / ("forecasts_" + sanitize(ctx.region) + "_h" + std::to_string(h) +
                                       ".tsv"));
            out << "date\tactual";
            for (const auto* name : kMethodNames) out << "\t" << name;
            out << "\n";
            for (std::size_t i = 0; i < c_index; ++i) {
                out << to_iso(ctx.original.date(i)) << "\t" << format_full(ctx.original[i]);
                for (std::size_t m = 0; m < kNumMethods; ++m) out << "\tNA";
                out << "\n";
            }
            for (std::size_t t = 0; t < static_cast<std::size_t>(h); ++t) {
                std::size_t i = c_index + t;
                out << to_iso(ctx.original.date(i)) << "\t"
                    << (i < ctx.original.size() ? format_full(ctx.original[i]) : "NA");
                for (std::size_t m = 0; m < kNumMethods; ++m) out << "\t" << cells[m][t];
                out << "\n";
            }
        }
    }
}

} // namespace fwstack

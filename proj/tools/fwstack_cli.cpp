#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fwstack/config.hpp"
#include "fwstack/errors.hpp"
#include "fwstack/ingestion.hpp"
#include "fwstack/pipeline.hpp"
#include "fwstack/report.hpp"
#include "fwstack/synth.hpp"

namespace {

using namespace fwstack;

struct CliOptions {
    std::string config_path;
    std::vector<std::string> sets; // key=value overrides
    std::vector<int> horizons;
    std::string snapshot, synthetic, out_dir, region;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs, jobs;
};

RunConfig make_config(const CliOptions& cli) {
    RunConfig config = cli.config_path.empty() ? RunConfig() : parse_config_file(cli.config_path);
    for (const auto& kv : cli.sets) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        apply_config_entry(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!cli.horizons.empty()) config.horizons = cli.horizons;
    if (!cli.snapshot.empty()) config.snapshot_path = cli.snapshot;
    if (!cli.synthetic.empty()) config.synthetic_path = cli.synthetic;
    if (!cli.out_dir.empty()) config.out_dir = cli.out_dir;
    if (cli.seed) config.seed = *cli.seed;
    if (cli.runs) config.n_runs = *cli.runs;
    if (cli.jobs) config.jobs = *cli.jobs;
    return config;
}

TimeSeries load_region(const RunConfig& config, const std::string& region) {
    if (!config.synthetic_path.empty()) {
        for (const auto& spec : load_curve_specs(config.synthetic_path))
            if (spec.region_id == region) return generate(spec);
        throw UnknownRegion("region '" + region + "' not present in the synthetic spec file");
    }
    if (config.snapshot_path.empty()) throw ConfigError("either snapshot or synthetic input is required");
    auto snap = load_snapshot(config.snapshot_path);
    return country_series(snap, region);
}

int cmd_ingest_check(const RunConfig& config) {
    if (config.snapshot_path.empty()) throw ConfigError("ingest-check needs a snapshot path");
    auto snap = load_snapshot(config.snapshot_path);
    std::printf("snapshot: %s\n", snap.path.c_str());
    std::printf("rows: %zu\n", snap.rows.size());
    std::printf("countries: %zu\n", snap.countries().size());
    std::printf("dates: %s .. %s (%zu days)\n", to_iso(snap.dates.front()).c_str(),
                to_iso(snap.dates.back()).c_str(), snap.dates.size());
    std::printf("checksum: %016llx\n",
                static_cast<unsigned long long>(file_checksum(config.snapshot_path)));
    std::printf("diagnostics: %zu\n", snap.diagnostics.size());
    for (const auto& d : snap.diagnostics) std::printf("  %s\n", d.c_str());

    std::vector<std::string> regions = config.train_regions;
    regions.insert(regions.end(), config.holdout_regions.begin(), config.holdout_regions.end());
    for (const auto& r : regions) {
        bool warn = false;
        auto series = country_series(snap, r, &warn);
        std::printf("region %-22s length=%zu last=%.0f%s\n", r.c_str(), series.size(),
                    series[series.size() - 1], warn ? " monotonicity-warning" : "");
    }
    return 0;
}

int cmd_features(const RunConfig& config, const std::string& region) {
    if (region.empty()) throw ConfigError("features needs --region");
    TimeSeries raw = load_region(config, region);
    PreparedRegion prepared = prepare_region(raw, config);
    int horizon = config.horizons.front();
    auto splits = split(prepared.working, horizon, config.stride);
    std::printf("region\twindow_start\tcv\tsvde\tkpss\tacf1\n");
    for (const auto& s : splits) {
        auto f = extract(s.window_a, config.features);
        std::printf("%s\t%s\t%.6f\t%.6f\t%.6f\t%.6f\n", region.c_str(),
                    to_iso(s.window_a.start_date()).c_str(), f.cv, f.svd_entropy, f.kpss, f.acf1);
    }
    return 0;
}

int cmd_forecast(const RunConfig& config, const std::string& region) {
    if (region.empty()) throw ConfigError("forecast needs --region");
    TimeSeries raw = load_region(config, region);
    PreparedRegion prepared = prepare_region(raw, config);
    int horizon = config.horizons.front();
    if (prepared.working.size() < SplitSet::kInputWindow)
        throw SeriesTooShort("region too short for a 30-day input window");

    TimeSeries window = prepared.working.slice(prepared.working.size() - SplitSet::kInputWindow,
                                               SplitSet::kInputWindow);
    std::printf("date");
    for (ForecastKind kind : kAllForecastKinds) std::printf("\t%s", to_string(kind));
    std::printf("\n");

    std::array<std::vector<double>, 4> original_units;
    for (ForecastKind kind : kAllForecastKinds) {
        ForecasterOptions fo{config.lstm, config.prophet_changepoints};
        auto model = fit_forecaster(kind, window, fo, config.seed);
        auto fc = model->predict(horizon);
        // invert smoothing from the end of the series, then Box-Cox
        std::vector<double> tail;
        for (int k = config.smooth_window - 1; k >= 1; --k)
            tail.push_back(prepared.transformed[prepared.transformed.size() - static_cast<std::size_t>(k)]);
        auto unsmoothed = invert_moving_average(fc, tail, config.smooth_window);
        TimeSeries tmp(region, prepared.working.end_date() + std::chrono::days(1), unsmoothed, true);
        original_units[static_cast<std::size_t>(kind)] = box_cox_inverse(tmp, prepared.box_cox).values();
    }
    for (int t = 0; t < horizon; ++t) {
        Days d = prepared.working.end_date() + std::chrono::days(t + 1);
        std::printf("%s", to_iso(d).c_str());
        for (std::size_t m = 0; m < 4; ++m) std::printf("\t%.2f", original_units[m][static_cast<std::size_t>(t)]);
        std::printf("\n");
    }
    return 0;
}

int cmd_run(const RunConfig& config) {
    auto report = run_pipeline(config);
    std::string summary = render_report(config.out_dir);
    std::fputs(summary.c_str(), stdout);
    std::printf("run complete: %s (leakage audit: %s)\n", config.out_dir.c_str(),
                report.audit.pass ? "pass" : "FAIL");
    if (!report.audit.pass) return 3;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feature-weighted stacking forecaster for nonseasonal epidemic curves"};
    app.require_subcommand(1);

    CliOptions cli;
    app.add_option("--config", cli.config_path, "flat key=value config file");
    app.add_option("--set", cli.sets, "override a config entry (key=value, repeatable)");
    app.add_option("--horizon", cli.horizons, "forecast horizon(s): 7 and/or 14");
    app.add_option("--snapshot", cli.snapshot, "cumulative-confirmed CSV snapshot");
    app.add_option("--synthetic", cli.synthetic, "synthetic curve spec JSON (instead of a snapshot)");
    app.add_option("--out", cli.out_dir, "output directory for run files");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "base RNG seed");
    int runs_value = 0;
    auto* runs_opt = app.add_option("--runs", runs_value, "number of averaged runs");
    int jobs_value = 0;
    auto* jobs_opt = app.add_option("--jobs", jobs_value, "max parallel window fits (0 = all cores)");

    auto* sub_ingest = app.add_subcommand("ingest-check", "parse and validate a snapshot");
    auto* sub_features = app.add_subcommand("features", "print meta-features per window of a region");
    auto* sub_forecast = app.add_subcommand("forecast", "base-model forecasts beyond a region's series");
    auto* sub_run = app.add_subcommand("run", "execute the full pipeline and write the report");
    auto* sub_report = app.add_subcommand("report", "re-render tables and plot data from a run directory");
    for (auto* sub : {sub_ingest, sub_features, sub_forecast, sub_run, sub_report}) sub->fallthrough();
    sub_features->add_option("--region", cli.region, "region id");
    sub_forecast->add_option("--region", cli.region, "region id");
    std::string report_dir;
    sub_report->add_option("dir", report_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (seed_opt->count()) cli.seed = seed_value;
        if (runs_opt->count()) cli.runs = runs_value;
        if (jobs_opt->count()) cli.jobs = jobs_value;

        if (sub_report->parsed()) {
            std::string summary = fwstack::render_report(report_dir);
            std::fputs(summary.c_str(), stdout);
            return 0;
        }

        RunConfig config = make_config(cli);
        if (sub_ingest->parsed()) return cmd_ingest_check(config);
        if (sub_features->parsed()) return cmd_features(config, cli.region);
        if (sub_forecast->parsed()) return cmd_forecast(config, cli.region);
        if (sub_run->parsed()) {
            config.validate();
            return cmd_run(config);
        }
        return 1;
    } catch (const fwstack::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const fwstack::UnreadableFile& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const fwstack::HeaderMismatch& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const fwstack::UnknownRegion& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const fwstack::InvalidSpec& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const fwstack::InvalidSeries& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const fwstack::SeriesTooShort& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const fwstack::IncompleteRun& e) {
        std::fprintf(stderr, "pipeline error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "pipeline error: %s\n", e.what());
        return 3;
    }
}

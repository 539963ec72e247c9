#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fwstack/ensemble.hpp"
#include "fwstack/forecasters.hpp"
#include "fwstack/metafeatures.hpp"
#include "fwstack/metrics.hpp"
#include "fwstack/synth.hpp"
#include "fwstack/timeseries.hpp"

namespace fwstack {

struct RunConfig {
    std::vector<int> horizons = {7, 14};
    std::vector<std::string> train_regions;   // defaults to the 20 distinct training countries
    std::vector<std::string> holdout_regions; // defaults to the 7 distinct held-out countries
    int stride = 7;
    int n_runs = 5;
    std::uint64_t seed = 0;
    int smooth_window = 2;
    bool repair_monotonic = true;
    FeatureOptions features;
    LstmOptions lstm;
    MlpOptions mlp;
    int prophet_changepoints = 14;
    int jobs = 0; // 0 = hardware concurrency
    std::string snapshot_path;
    std::string synthetic_path;
    std::string out_dir = "fwstack-run";

    static std::vector<std::string> default_train_regions();
    static std::vector<std::string> default_holdout_regions();

    RunConfig();
    void validate() const; // throws ConfigError
};

/// Leaderboard methods in their fixed report order.
inline constexpr std::array<const char*, 7> kMethodNames = {
    "ARIMA", "Holt-Winters", "Prophet", "LSTM", "Model Averaging", "Stacking",
    "Feature-weighted stacking"};
constexpr std::size_t kNumMethods = 7;

/// Two lowest mean sMAPEs, best first; ties break by the fixed model order.
std::array<ForecastKind, 2> select_base_pair(const std::array<double, 4>& mean_smape);

/// Two highest mean |rho| columns, best first; ties break by the fixed
/// feature order.
std::array<MetaFeature, 2> select_feature_pair(const ScoreTable& table);

/// Region after Box-Cox and trailing-average smoothing; `working` is the
/// series every fit, feature and score sees.
struct PreparedRegion {
    TimeSeries original;
    TimeSeries transformed; // Box-Cox, pre-smoothing
    TimeSeries working;     // Box-Cox + moving average
    BoxCoxParams box_cox;
    bool monotonicity_warning = false;
};

PreparedRegion prepare_region(const TimeSeries& raw, const RunConfig& config);

/// One fit logged for the leakage audit: who was fitted on which date span,
/// and which held-out span belonged to that window.
struct FitRecord {
    std::string region;
    std::string stage; // step1-d, step1-e, step3, step4
    Days input_start, input_end;
    Days target_start, target_end;
};

struct LeakageAudit {
    bool pass = true;
    std::size_t fits_checked = 0;
    std::vector<std::string> violations;
};

/// Per-region forecasts of one (horizon, run) holdout evaluation, in the
/// transformed (working) space.
struct HoldoutRegionResult {
    std::string region;
    std::vector<double> target; // window C, working space
    std::array<std::vector<double>, kNumMethods> method_forecasts;
    MetaFeatureVector features_b;
};

struct HorizonRunOutcome {
    int horizon = 0;
    int run = 0;
    std::array<ForecastKind, 2> base_pair{};
    std::array<MetaFeature, 2> feature_pair{};
    std::array<double, kNumMethods> method_smape{}; // mean over holdout regions
    ScoreTable score_table;                         // signed rho, this run's d-stage
    std::vector<HoldoutRegionResult> regions;
    EnsembleBundle fw_bundle;
    EnsembleBundle stacking_bundle;
};

/// Per-window artifacts shared across runs (deterministic models) plus the
/// run-dependent LSTM results merged in; serialized into the raw files.
struct WindowScore {
    std::string region;
    Days window_start; // start of window A
    MetaFeatureVector features_a;
    std::array<double, 4> d_smape{}; // per model, one run
};

struct RunReport {
    RunConfig config;
    std::string data_source;
    std::uint64_t data_checksum = 0;
    std::map<int, std::vector<HorizonRunOutcome>> runs; // horizon -> one outcome per run
    std::map<int, std::vector<std::vector<WindowScore>>> window_scores; // horizon -> run -> windows
    std::map<int, std::vector<WindowScore>> static_features; // all statically-OK windows
    std::map<int, ScoreTable> mean_score_tables;
    std::array<std::map<int, double>, kNumMethods> leaderboard; // method -> horizon -> mean sMAPE
    LeakageAudit audit;
    std::map<int, std::size_t> windows_total, windows_failed;
    std::vector<FitRecord> fit_records;
    // original-unit context for the forecast files
    struct HoldoutContext {
        std::string region;
        TimeSeries original;
        TimeSeries transformed;
        BoxCoxParams box_cox;
        std::map<int, Days> c_start; // per horizon
    };
    std::vector<HoldoutContext> holdout_context;
};

/// Executes Steps 1-4 for every configured horizon, repeating the stochastic
/// portions n_runs times with seeds seed+0..n_runs-1, and writes the raw
/// report files plus the manifest into config.out_dir. Derived tables come
/// from render_report afterwards.
RunReport run_pipeline(const RunConfig& config);

/// Raw report files + manifest (called by run_pipeline; exposed for tests).
void write_raw_report(const RunReport& report);

} // namespace fwstack

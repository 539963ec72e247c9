#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fwstack/timeseries.hpp"

namespace fwstack {

enum class ForecastKind { Arima = 0, HoltWinters = 1, ProphetTrend = 2, Lstm = 3 };

inline constexpr std::array<ForecastKind, 4> kAllForecastKinds = {
    ForecastKind::Arima, ForecastKind::HoltWinters, ForecastKind::ProphetTrend, ForecastKind::Lstm};

const char* to_string(ForecastKind k);
ForecastKind forecast_kind_from_string(const std::string& name);

/// Common fit/predict surface of the four base models.
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::vector<double> predict(int horizon) const = 0;
    virtual ForecastKind kind() const = 0;
    virtual std::string summary() const = 0;
};

// ---------------------------------------------------------------------------
// ARIMA
// ---------------------------------------------------------------------------

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    static constexpr int kMaxP = 5;
    static constexpr int kMaxQ = 5;
    static constexpr int kMaxD = 2;
};

class ArimaModel final : public Forecaster {
public:
    /// Parameters are on the d-times differenced series; `mean` is the
    /// plug-in sample mean (only when d == 0, else 0).
    ArimaModel(ArimaOrder order, double mean, std::vector<double> ar, std::vector<double> ma,
               const TimeSeries& train);

    std::vector<double> predict(int horizon) const override;
    ForecastKind kind() const override { return ForecastKind::Arima; }
    std::string summary() const override;

    const ArimaOrder& order() const { return order_; }
    double mean() const { return mean_; }
    const std::vector<double>& ar() const { return ar_; }
    const std::vector<double>& ma() const { return ma_; }
    double aic() const { return aic_; }
    double sse() const { return sse_; }

private:
    friend ArimaModel fit_arima(const TimeSeries&);
    ArimaOrder order_;
    double mean_;
    std::vector<double> ar_, ma_;
    std::vector<double> train_;      // original-scale training values
    std::vector<double> residuals_;  // CSS residuals on the differenced series
    double sse_ = 0.0;
    double aic_ = 0.0;
};

/// Grid search over (p,d,q) with p,q <= 5, d <= 2; per candidate a CSS fit
/// (zero pre-sample residuals) started from Hannan-Rissanen values and
/// polished by Nelder-Mead, scored by AIC = 2k + n ln(SSE/n). Non-causal or
/// non-invertible candidates are skipped; if every candidate fails the model
/// falls back to (0,1,0).
ArimaModel fit_arima(const TimeSeries& train);

// ---------------------------------------------------------------------------
// Holt-Winters double exponential smoothing
// ---------------------------------------------------------------------------

struct HwParams {
    double alpha = 0.5;
    double gamma = 0.5;
    double level = 0.0; // final smoothed level S_n
    double trend = 0.0; // final trend b_n
};

class HoltWintersModel final : public Forecaster {
public:
    explicit HoltWintersModel(HwParams params) : params_(params) {}

    std::vector<double> predict(int horizon) const override;
    ForecastKind kind() const override { return ForecastKind::HoltWinters; }
    std::string summary() const override;

    const HwParams& params() const { return params_; }

private:
    HwParams params_;
};

/// In-sample one-step SSE of the smoothing recursion for fixed (alpha, gamma),
/// initialized S_1 = y_1, b_1 = y_2 - y_1. Exposed for the optimizer tests.
double hw_sse(const std::vector<double>& y, double alpha, double gamma);

/// Run the recursion and return the final (level, trend) state.
HwParams hw_state(const std::vector<double>& y, double alpha, double gamma);

/// (alpha, gamma) minimizing hw_sse via multi-start Nelder-Mead from the 3x3
/// grid over {0.1, 0.5, 0.9}^2, clamped to [0.001, 0.999].
HwParams fit_hw(const TimeSeries& train);

// ---------------------------------------------------------------------------
// Piecewise-linear trend with changepoints
// ---------------------------------------------------------------------------

class TrendModel final : public Forecaster {
public:
    TrendModel(double k, double m, std::vector<double> changepoints, std::vector<double> delta,
               int train_len);

    /// g(t) = (k + sum_j 1[t >= s_j] delta_j) t + (m + sum_j 1[t >= s_j] gamma_j)
    /// with gamma_j = -s_j delta_j keeping the curve continuous.
    double evaluate(double t) const;

    std::vector<double> predict(int horizon) const override;
    ForecastKind kind() const override { return ForecastKind::ProphetTrend; }
    std::string summary() const override;

    double base_rate() const { return k_; }
    double offset() const { return m_; }
    const std::vector<double>& changepoints() const { return changepoints_; }
    const std::vector<double>& delta() const { return delta_; }
    const std::vector<double>& gamma_adj() const { return gamma_; }

private:
    double k_, m_;
    std::vector<double> changepoints_, delta_, gamma_;
    int train_len_;
};

/// Ridge-regularized least squares of the piecewise-linear trend, penalty 0.5
/// on ||delta||^2 only. Changepoints sit at uniform quantiles of the first
/// 80% of the training span.
TrendModel fit_prophet_trend(const TimeSeries& train, int n_changepoints = 14);

// ---------------------------------------------------------------------------
// LSTM
// ---------------------------------------------------------------------------

struct LstmOptions {
    std::vector<int> widths = {192, 384, 384};
    int seq_len = 8;
    int batch_size = 4;
    int epochs = 110;
    double learning_rate = 1e-5;
};

/// One peephole LSTM layer. Peephole weights are diagonal and stored as
/// vectors; the output gate peeks at the current cell state.
struct LstmLayer {
    // gate weight matrices from the layer input
    Eigen::MatrixXd w_ix, w_fx, w_cx, w_ox;
    // recurrent matrices from the previous output
    Eigen::MatrixXd w_im, w_fm, w_cm, w_om;
    // diagonal peephole weights
    Eigen::VectorXd w_ic, w_fc, w_oc;
    Eigen::VectorXd b_i, b_f, b_c, b_o;

    int input_size() const { return static_cast<int>(w_ix.cols()); }
    int units() const { return static_cast<int>(w_ix.rows()); }
};

class LstmNetwork final : public Forecaster {
public:
    LstmNetwork(std::vector<LstmLayer> layers, Eigen::RowVectorXd w_ym, double b_y);

    /// Forward pass over one scalar input sequence; returns the output at the
    /// final time step.
    double forward(const std::vector<double>& sequence) const;

    std::vector<double> predict(int horizon) const override;
    ForecastKind kind() const override { return ForecastKind::Lstm; }
    std::string summary() const override;

    std::vector<LstmLayer>& layers() { return layers_; }
    const std::vector<LstmLayer>& layers() const { return layers_; }
    Eigen::RowVectorXd& output_weights() { return w_ym_; }
    const Eigen::RowVectorXd& output_weights() const { return w_ym_; }
    double& output_bias() { return b_y_; }
    double output_bias() const { return b_y_; }

    /// MSE over (sequence -> next value) pairs plus its analytic gradient via
    /// backpropagation through time, as one flat parameter-ordered vector.
    /// Exposed so tests can check it against finite differences.
    double loss_and_gradient(const std::vector<std::vector<double>>& inputs,
                             const std::vector<double>& targets, Eigen::VectorXd& grad) const;

    Eigen::VectorXd flatten_parameters() const;
    void set_parameters(const Eigen::VectorXd& flat);
    std::size_t parameter_count() const;

    double final_training_loss() const { return final_loss_; }

    /// Snapshot of the training window in normalized space plus the min/max
    /// record, installed by fit_lstm so predict() can run recursively.
    void set_forecast_state(std::vector<double> normalized_tail, double min_v, double max_v);

private:
    std::vector<LstmLayer> layers_;
    Eigen::RowVectorXd w_ym_;
    double b_y_ = 0.0;
    double final_loss_ = 0.0;
    std::vector<double> normalized_tail_;
    double norm_min_ = 0.0, norm_max_ = 1.0;
    friend LstmNetwork fit_lstm(const TimeSeries&, const LstmOptions&, std::uint64_t);
};

/// Zero-initialized network of the given widths for a scalar input.
LstmNetwork make_lstm(const std::vector<int>& widths);

/// Train on sliding (seq_len -> next value) pairs of the min-max normalized
/// window: Adam, MSE loss, per-epoch shuffling driven by `seed`.
LstmNetwork fit_lstm(const TimeSeries& train, const LstmOptions& opts, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Factory
// ---------------------------------------------------------------------------

struct ForecasterOptions {
    LstmOptions lstm;
    int prophet_changepoints = 14;
};

std::unique_ptr<Forecaster> fit_forecaster(ForecastKind kind, const TimeSeries& train,
                                           const ForecasterOptions& opts, std::uint64_t seed);

} // namespace fwstack

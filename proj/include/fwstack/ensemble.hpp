#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fwstack/forecasters.hpp"
#include "fwstack/metafeatures.hpp"

namespace fwstack {

/// Elementwise mean of two forecasts.
std::vector<double> model_average(std::span<const double> f1, std::span<const double> f2);

enum class Activation { Tanh, Identity };

/// Two hidden layers and one linear output unit. The hidden and output
/// activations are carried by the type; training uses tanh/identity.
struct MlpNetwork {
    Eigen::MatrixXd w1, w2;  // hidden weights
    Eigen::RowVectorXd w3;   // output weights
    Eigen::VectorXd b1, b2;
    double b3 = 0.0;
    Activation hidden_activation = Activation::Tanh;
    Activation output_activation = Activation::Identity;

    int input_width() const { return static_cast<int>(w1.cols()); }

    double forward(const Eigen::VectorXd& x) const;

    /// MAE over rows plus its analytic gradient in flat parameter order
    /// (w1, b1, w2, b2, w3, b3); exposed for the finite-difference tests.
    double loss_and_gradient(const std::vector<Eigen::VectorXd>& inputs,
                             const std::vector<double>& targets, Eigen::VectorXd& grad) const;

    Eigen::VectorXd flatten_parameters() const;
    void set_parameters(const Eigen::VectorXd& flat);
    std::size_t parameter_count() const;
};

MlpNetwork make_mlp(int input_width, int hidden_width);

struct MlpOptions {
    int hidden_width = 176;
    int epochs = 199;
    double learning_rate = 3.6e-5;
    int batch_size = 32;
};

struct NormRecord {
    double min = 0.0;
    double max = 1.0;
    /// Columns with min == max pass through as 0.
    double apply(double v) const { return max > min ? (v - min) / (max - min) : 0.0; }
    double invert(double v) const { return max > min ? min + v * (max - min) : min; }
};

struct TrainRow {
    std::vector<double> inputs;
    double target = 0.0;
};

/// Meta-learner plus the per-column min/max records captured at training
/// time (inputs and target both normalize to [0,1]).
struct TrainedMlp {
    MlpNetwork net;
    std::vector<NormRecord> input_norm;
    NormRecord target_norm;
    std::vector<double> epoch_losses; // training MAE after each epoch

    double predict(const std::vector<double>& inputs) const;
};

TrainedMlp train_meta_learner(const std::vector<TrainRow>& rows, const MlpOptions& opts,
                              std::uint64_t seed);

/// One row per horizon step: [f1_t, f2_t] for plain stacking, plus the two
/// selected meta-feature values (constant down the rows) when present.
std::vector<std::vector<double>> stack_inputs(std::span<const double> f1, std::span<const double> f2,
                                              std::optional<std::array<double, 2>> features);

/// Selected base pair, selected feature pair, and the trained meta-learner.
/// Pairs are ordered best-first; members are distinct.
struct EnsembleBundle {
    std::array<ForecastKind, 2> base_pair;
    std::array<MetaFeature, 2> feature_pair;
    bool feature_weighted = true;
    TrainedMlp meta;

    std::array<double, 2> select_features(const MetaFeatureVector& v) const {
        return {v.get(feature_pair[0]), v.get(feature_pair[1])};
    }
};

std::vector<double> predict_ensemble(const EnsembleBundle& bundle, std::span<const double> f1,
                                     std::span<const double> f2, const MetaFeatureVector& features);

/// Versioned JSON model file so training and prediction can run as separate
/// invocations.
void save_bundle(const EnsembleBundle& bundle, const std::string& path);
EnsembleBundle load_bundle(const std::string& path);

} // namespace fwstack

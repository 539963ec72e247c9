#include "fwstack/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "fwstack/detail/rng.hpp"
#include "fwstack/errors.hpp"

namespace fwstack {

std::vector<double> model_average(std::span<const double> f1, std::span<const double> f2) {
    if (f1.size() != f2.size()) throw LengthMismatch("model_average: lengths differ");
    std::vector<double> out(f1.size());
    for (std::size_t i = 0; i < f1.size(); ++i) out[i] = (f1[i] + f2[i]) / 2.0;
    return out;
}

namespace {

double activate(Activation a, double v) { return a == Activation::Tanh ? std::tanh(v) : v; }

Eigen::VectorXd activate(Activation a, Eigen::VectorXd v) {
    if (a == Activation::Tanh) return v.array().tanh();
    return v;
}

Eigen::VectorXd activate_grad(Activation a, const Eigen::VectorXd& out) {
    if (a == Activation::Tanh) return (1.0 - out.array().square()).matrix();
    return Eigen::VectorXd::Ones(out.size());
}

} // namespace

double MlpNetwork::forward(const Eigen::VectorXd& x) const {
    if (x.size() != w1.cols()) throw InconsistentWidth("MLP forward: input width mismatch");
    Eigen::VectorXd h1 = activate(hidden_activation, w1 * x + b1);
    Eigen::VectorXd h2 = activate(hidden_activation, w2 * h1 + b2);
    return activate(output_activation, w3.dot(h2) + b3);
}

std::size_t MlpNetwork::parameter_count() const {
    return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size() + w3.size()) + 1;
}

Eigen::VectorXd MlpNetwork::flatten_parameters() const {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index at = 0;
    auto put = [&](const auto& block) {
        flat.segment(at, block.size()) = Eigen::Map<const Eigen::VectorXd>(block.data(), block.size());
        at += block.size();
    };
    put(w1);
    put(b1);
    put(w2);
    put(b2);
    put(w3);
    flat[at] = b3;
    return flat;
}

void MlpNetwork::set_parameters(const Eigen::VectorXd& flat) {
    if (flat.size() != static_cast<Eigen::Index>(parameter_count()))
        throw InconsistentWidth("MLP parameter vector has the wrong size");
    Eigen::Index at = 0;
    auto take = [&](auto& block) {
        Eigen::Map<Eigen::VectorXd>(block.data(), block.size()) = flat.segment(at, block.size());
        at += block.size();
    };
    take(w1);
    take(b1);
    take(w2);
    take(b2);
    take(w3);
    b3 = flat[at];
}

double MlpNetwork::loss_and_gradient(const std::vector<Eigen::VectorXd>& inputs,
                                     const std::vector<double>& targets, Eigen::VectorXd& grad) const {
    if (inputs.size() != targets.size()) throw LengthMismatch("MLP loss: inputs and targets differ");
    if (inputs.empty()) throw EmptyInput("MLP loss: empty batch");

    Eigen::MatrixXd g_w1 = Eigen::MatrixXd::Zero(w1.rows(), w1.cols());
    Eigen::MatrixXd g_w2 = Eigen::MatrixXd::Zero(w2.rows(), w2.cols());
    Eigen::RowVectorXd g_w3 = Eigen::RowVectorXd::Zero(w3.size());
    Eigen::VectorXd g_b1 = Eigen::VectorXd::Zero(b1.size());
    Eigen::VectorXd g_b2 = Eigen::VectorXd::Zero(b2.size());
    double g_b3 = 0.0;

    const double inv_n = 1.0 / static_cast<double>(inputs.size());
    double loss = 0.0;
    for (std::size_t s = 0; s < inputs.size(); ++s) {
        const Eigen::VectorXd& x = inputs[s];
        Eigen::VectorXd h1 = activate(hidden_activation, w1 * x + b1);
        Eigen::VectorXd h2 = activate(hidden_activation, w2 * h1 + b2);
        double pre_out = w3.dot(h2) + b3;
        double y = activate(output_activation, pre_out);

        double err = y - targets[s];
        loss += std::abs(err) * inv_n;
        double dy = (err > 0.0 ? 1.0 : (err < 0.0 ? -1.0 : 0.0)) * inv_n;
        double dpre = dy * (output_activation == Activation::Tanh ? 1.0 - y * y : 1.0);

        g_w3 += dpre * h2.transpose();
        g_b3 += dpre;
        Eigen::VectorXd dh2 = (w3.transpose() * dpre).cwiseProduct(activate_grad(hidden_activation, h2));
        g_w2 += dh2 * h1.transpose();
        g_b2 += dh2;
        Eigen::VectorXd dh1 = (w2.transpose() * dh2).cwiseProduct(activate_grad(hidden_activation, h1));
        g_w1 += dh1 * x.transpose();
        g_b1 += dh1;
    }

    grad.resize(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index at = 0;
    auto put = [&](const auto& block) {
        grad.segment(at, block.size()) = Eigen::Map<const Eigen::VectorXd>(block.data(), block.size());
        at += block.size();
    };
    put(g_w1);
    put(g_b1);
    put(g_w2);
    put(g_b2);
    put(g_w3);
    grad[at] = g_b3;
    return loss;
}

MlpNetwork make_mlp(int input_width, int hidden_width) {
    if (input_width < 1 || hidden_width < 1) throw InvalidSpec("MLP widths must be >= 1");
    MlpNetwork net;
    net.w1 = Eigen::MatrixXd::Zero(hidden_width, input_width);
    net.w2 = Eigen::MatrixXd::Zero(hidden_width, hidden_width);
    net.w3 = Eigen::RowVectorXd::Zero(hidden_width);
    net.b1 = Eigen::VectorXd::Zero(hidden_width);
    net.b2 = Eigen::VectorXd::Zero(hidden_width);
    return net;
}

double TrainedMlp::predict(const std::vector<double>& inputs) const {
    if (inputs.size() != input_norm.size())
        throw InconsistentWidth("TrainedMlp::predict: input width mismatch");
    Eigen::VectorXd x(static_cast<Eigen::Index>(inputs.size()));
    for (std::size_t i = 0; i < inputs.size(); ++i)
        x[static_cast<Eigen::Index>(i)] = input_norm[i].apply(inputs[i]);
    return target_norm.invert(net.forward(x));
}

TrainedMlp train_meta_learner(const std::vector<TrainRow>& rows, const MlpOptions& opts,
                              std::uint64_t seed) {
    if (rows.empty()) throw EmptyInput("train_meta_learner requires at least one row");
    const std::size_t width = rows[0].inputs.size();
    for (const auto& row : rows)
        if (row.inputs.size() != width)
            throw InconsistentWidth("train_meta_learner: inconsistent input widths");

    TrainedMlp out;
    out.input_norm.assign(width, {});
    for (std::size_t j = 0; j < width; ++j) {
        double lo = rows[0].inputs[j], hi = rows[0].inputs[j];
        for (const auto& row : rows) {
            lo = std::min(lo, row.inputs[j]);
            hi = std::max(hi, row.inputs[j]);
        }
        out.input_norm[j] = {lo, hi};
    }
    {
        double lo = rows[0].target, hi = rows[0].target;
        for (const auto& row : rows) {
            lo = std::min(lo, row.target);
            hi = std::max(hi, row.target);
        }
        out.target_norm = {lo, hi};
    }

    std::vector<Eigen::VectorXd> inputs(rows.size());
    std::vector<double> targets(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(width));
        for (std::size_t j = 0; j < width; ++j)
            x[static_cast<Eigen::Index>(j)] = out.input_norm[j].apply(rows[r].inputs[j]);
        inputs[r] = std::move(x);
        targets[r] = out.target_norm.apply(rows[r].target);
    }

    MlpNetwork net = make_mlp(static_cast<int>(width), opts.hidden_width);
    detail::Rng rng(detail::mix_seed(seed, 0x317au));
    Eigen::VectorXd flat(static_cast<Eigen::Index>(net.parameter_count()));
    Eigen::Index at = 0;
    auto init = [&](Eigen::Index count, double fan_in) {
        double bound = 1.0 / std::sqrt(fan_in);
        for (Eigen::Index k = 0; k < count; ++k) flat[at++] = rng.uniform(-bound, bound);
    };
    init(net.w1.size(), static_cast<double>(width));
    for (Eigen::Index k = 0; k < net.b1.size(); ++k) flat[at++] = 0.0;
    init(net.w2.size(), static_cast<double>(opts.hidden_width));
    for (Eigen::Index k = 0; k < net.b2.size(); ++k) flat[at++] = 0.0;
    init(net.w3.size(), static_cast<double>(opts.hidden_width));
    flat[at] = 0.0;
    net.set_parameters(flat);

    const Eigen::Index n_params = flat.size();
    Eigen::VectorXd m = Eigen::VectorXd::Zero(n_params);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n_params);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double beta1_t = 1.0, beta2_t = 1.0;
    Eigen::VectorXd grad;
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    out.epoch_losses.reserve(static_cast<std::size_t>(opts.epochs));
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < rows.size(); start += static_cast<std::size_t>(opts.batch_size)) {
            std::size_t stop = std::min(rows.size(), start + static_cast<std::size_t>(opts.batch_size));
            std::vector<Eigen::VectorXd> bx;
            std::vector<double> bt;
            bx.reserve(stop - start);
            bt.reserve(stop - start);
            for (std::size_t k = start; k < stop; ++k) {
                bx.push_back(inputs[order[k]]);
                bt.push_back(targets[order[k]]);
            }
            net.loss_and_gradient(bx, bt, grad);
            beta1_t *= beta1;
            beta2_t *= beta2;
            m = beta1 * m + (1.0 - beta1) * grad;
            v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
            Eigen::VectorXd m_hat = m / (1.0 - beta1_t);
            Eigen::VectorXd v_hat = v / (1.0 - beta2_t);
            flat -= opts.learning_rate *
                    m_hat.cwiseQuotient(v_hat.cwiseSqrt() + Eigen::VectorXd::Constant(n_params, eps));
            net.set_parameters(flat);
        }
        out.epoch_losses.push_back(net.loss_and_gradient(inputs, targets, grad));
    }

    out.net = std::move(net);
    return out;
}

std::vector<std::vector<double>> stack_inputs(std::span<const double> f1, std::span<const double> f2,
                                              std::optional<std::array<double, 2>> features) {
    if (f1.size() != f2.size()) throw LengthMismatch("stack_inputs: forecast lengths differ");
    std::vector<std::vector<double>> rows(f1.size());
    for (std::size_t t = 0; t < f1.size(); ++t) {
        rows[t] = {f1[t], f2[t]};
        if (features) {
            rows[t].push_back((*features)[0]);
            rows[t].push_back((*features)[1]);
        }
    }
    return rows;
}

std::vector<double> predict_ensemble(const EnsembleBundle& bundle, std::span<const double> f1,
                                     std::span<const double> f2, const MetaFeatureVector& features) {
    std::optional<std::array<double, 2>> feats;
    if (bundle.feature_weighted) feats = bundle.select_features(features);
    auto rows = stack_inputs(f1, f2, feats);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(bundle.meta.predict(row));
    return out;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> data(m.data(), m.data() + m.size());
    j["data"] = data;
    return j;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    Eigen::MatrixXd m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
    std::vector<double> data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != m.size())
        throw InvalidSpec("bundle matrix payload has the wrong size");
    std::copy(data.begin(), data.end(), m.data());
    return m;
}

constexpr int kBundleVersion = 1;

} // namespace

void save_bundle(const EnsembleBundle& bundle, const std::string& path) {
    nlohmann::json j;
    j["format"] = "fwstack-ensemble";
    j["version"] = kBundleVersion;
    j["base_pair"] = {to_string(bundle.base_pair[0]), to_string(bundle.base_pair[1])};
    j["feature_pair"] = {to_string(bundle.feature_pair[0]), to_string(bundle.feature_pair[1])};
    j["feature_weighted"] = bundle.feature_weighted;
    j["net"]["w1"] = matrix_to_json(bundle.meta.net.w1);
    j["net"]["w2"] = matrix_to_json(bundle.meta.net.w2);
    j["net"]["w3"] = matrix_to_json(bundle.meta.net.w3);
    j["net"]["b1"] = matrix_to_json(bundle.meta.net.b1);
    j["net"]["b2"] = matrix_to_json(bundle.meta.net.b2);
    j["net"]["b3"] = bundle.meta.net.b3;
    j["net"]["hidden_activation"] = bundle.meta.net.hidden_activation == Activation::Tanh ? "tanh" : "identity";
    j["net"]["output_activation"] = bundle.meta.net.output_activation == Activation::Tanh ? "tanh" : "identity";
    nlohmann::json norms = nlohmann::json::array();
    for (const auto& n : bundle.meta.input_norm) norms.push_back({{"min", n.min}, {"max", n.max}});
    j["input_norm"] = norms;
    j["target_norm"] = {{"min", bundle.meta.target_norm.min}, {"max", bundle.meta.target_norm.max}};

    std::ofstream out(path);
    if (!out) throw UnreadableFile("cannot write bundle file: " + path);
    out << j.dump(2) << "\n";
}

EnsembleBundle load_bundle(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnreadableFile("cannot read bundle file: " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != "fwstack-ensemble" || j.value("version", -1) != kBundleVersion)
        throw InvalidSpec("unsupported bundle file: " + path);

    EnsembleBundle bundle;
    bundle.base_pair = {forecast_kind_from_string(j.at("base_pair")[0].get<std::string>()),
                        forecast_kind_from_string(j.at("base_pair")[1].get<std::string>())};
    auto feature_from_string = [](const std::string& name) {
        for (std::size_t i = 0; i < kMetaFeatureNames.size(); ++i)
            if (name == kMetaFeatureNames[i]) return static_cast<MetaFeature>(i);
        throw InvalidSpec("unknown meta-feature name: " + name);
    };
    bundle.feature_pair = {feature_from_string(j.at("feature_pair")[0].get<std::string>()),
                           feature_from_string(j.at("feature_pair")[1].get<std::string>())};
    bundle.feature_weighted = j.at("feature_weighted").get<bool>();
    bundle.meta.net.w1 = matrix_from_json(j.at("net").at("w1"));
    bundle.meta.net.w2 = matrix_from_json(j.at("net").at("w2"));
    bundle.meta.net.w3 = matrix_from_json(j.at("net").at("w3"));
    bundle.meta.net.b1 = matrix_from_json(j.at("net").at("b1"));
    bundle.meta.net.b2 = matrix_from_json(j.at("net").at("b2"));
    bundle.meta.net.b3 = j.at("net").at("b3").get<double>();
    bundle.meta.net.hidden_activation =
        j.at("net").at("hidden_activation") == "tanh" ? Activation::Tanh : Activation::Identity;
    bundle.meta.net.output_activation =
        j.at("net").at("output_activation") == "tanh" ? Activation::Tanh : Activation::Identity;
    for (const auto& n : j.at("input_norm"))
        bundle.meta.input_norm.push_back({n.at("min").get<double>(), n.at("max").get<double>()});
    bundle.meta.target_norm = {j.at("target_norm").at("min").get<double>(),
                               j.at("target_norm").at("max").get<double>()};
    return bundle;
}

} // namespace fwstack

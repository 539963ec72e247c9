#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "fwstack/detail/rng.hpp"
#include "fwstack/errors.hpp"
#include "fwstack/forecasters.hpp"

namespace fwstack {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd sigmoid(const VectorXd& z) {
    return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

// Per-layer forward activations kept for backpropagation through time.
struct LayerCache {
    std::vector<VectorXd> x, i, f, g, o, c, m, tanh_c;
};

// Visits every parameter block of one layer in the canonical flattening order.
template <typename Layer, typename F>
void visit_layer_blocks(Layer& layer, F&& f) {
    f(layer.w_ix, layer.w_ix.cols());
    f(layer.w_fx, layer.w_fx.cols());
    f(layer.w_cx, layer.w_cx.cols());
    f(layer.w_ox, layer.w_ox.cols());
    f(layer.w_im, layer.w_im.cols());
    f(layer.w_fm, layer.w_fm.cols());
    f(layer.w_cm, layer.w_cm.cols());
    f(layer.w_om, layer.w_om.cols());
    f(layer.w_ic, layer.w_ic.size());
    f(layer.w_fc, layer.w_fc.size());
    f(layer.w_oc, layer.w_oc.size());
    f(layer.b_i, 0);
    f(layer.b_f, 0);
    f(layer.b_c, 0);
    f(layer.b_o, 0);
}

LstmLayer zero_layer(int input_size, int units) {
    LstmLayer l;
    l.w_ix = MatrixXd::Zero(units, input_size);
    l.w_fx = MatrixXd::Zero(units, input_size);
    l.w_cx = MatrixXd::Zero(units, input_size);
    l.w_ox = MatrixXd::Zero(units, input_size);
    l.w_im = MatrixXd::Zero(units, units);
    l.w_fm = MatrixXd::Zero(units, units);
    l.w_cm = MatrixXd::Zero(units, units);
    l.w_om = MatrixXd::Zero(units, units);
    l.w_ic = VectorXd::Zero(units);
    l.w_fc = VectorXd::Zero(units);
    l.w_oc = VectorXd::Zero(units);
    l.b_i = VectorXd::Zero(units);
    l.b_f = VectorXd::Zero(units);
    l.b_c = VectorXd::Zero(units);
    l.b_o = VectorXd::Zero(units);
    return l;
}

} // namespace

LstmNetwork make_lstm(const std::vector<int>& widths) {
    if (widths.empty()) throw InvalidSpec("LSTM needs at least one layer");
    std::vector<LstmLayer> layers;
    int input = 1;
    for (int w : widths) {
        if (w < 1) throw InvalidSpec("LSTM layer widths must be >= 1");
        layers.push_back(zero_layer(input, w));
        input = w;
    }
    return LstmNetwork(std::move(layers), Eigen::RowVectorXd::Zero(widths.back()), 0.0);
}

LstmNetwork::LstmNetwork(std::vector<LstmLayer> layers, Eigen::RowVectorXd w_ym, double b_y)
    : layers_(std::move(layers)), w_ym_(std::move(w_ym)), b_y_(b_y) {
    if (layers_.empty()) throw InvalidSpec("LSTM needs at least one layer");
    if (w_ym_.size() != layers_.back().units())
        throw InvalidSpec("LSTM output map width must match the top layer");
}

std::size_t LstmNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_)
        visit_layer_blocks(layer, [&](const auto& block, auto) { n += static_cast<std::size_t>(block.size()); });
    return n + static_cast<std::size_t>(w_ym_.size()) + 1;
}

Eigen::VectorXd LstmNetwork::flatten_parameters() const {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index at = 0;
    for (const auto& layer : layers_)
        visit_layer_blocks(layer, [&](const auto& block, auto) {
            flat.segment(at, block.size()) = Eigen::Map<const VectorXd>(block.data(), block.size());
            at += block.size();
        });
    flat.segment(at, w_ym_.size()) = w_ym_.transpose();
    at += w_ym_.size();
    flat[at] = b_y_;
    return flat;
}

void LstmNetwork::set_parameters(const Eigen::VectorXd& flat) {
    if (flat.size() != static_cast<Eigen::Index>(parameter_count()))
        throw InconsistentWidth("LSTM parameter vector has the wrong size");
    Eigen::Index at = 0;
    for (auto& layer : layers_)
        visit_layer_blocks(layer, [&](auto& block, auto) {
            Eigen::Map<VectorXd>(block.data(), block.size()) = flat.segment(at, block.size());
            at += block.size();
        });
    w_ym_ = flat.segment(at, w_ym_.size()).transpose();
    at += w_ym_.size();
    b_y_ = flat[at];
}

namespace {

// Runs the stacked forward pass; fills caches when given.
double forward_impl(const std::vector<LstmLayer>& layers, const Eigen::RowVectorXd& w_ym, double b_y,
                    const std::vector<double>& sequence, std::vector<LayerCache>* caches) {
    const std::size_t T = sequence.size();
    if (T == 0) throw EmptyInput("LSTM forward needs a nonempty sequence");
    if (caches) caches->assign(layers.size(), {});

    std::vector<VectorXd> m_prev(layers.size()), c_prev(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        m_prev[l] = VectorXd::Zero(layers[l].units());
        c_prev[l] = VectorXd::Zero(layers[l].units());
    }

    VectorXd top_m;
    for (std::size_t t = 0; t < T; ++t) {
        VectorXd x(1);
        x[0] = sequence[t];
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const LstmLayer& L = layers[l];
            VectorXd i = sigmoid(L.w_ix * x + L.w_im * m_prev[l] + L.w_ic.cwiseProduct(c_prev[l]) + L.b_i);
            VectorXd f = sigmoid(L.w_fx * x + L.w_fm * m_prev[l] + L.w_fc.cwiseProduct(c_prev[l]) + L.b_f);
            VectorXd g = (L.w_cx * x + L.w_cm * m_prev[l] + L.b_c).array().tanh();
            VectorXd c = f.cwiseProduct(c_prev[l]) + i.cwiseProduct(g);
            VectorXd o = sigmoid(L.w_ox * x + L.w_om * m_prev[l] + L.w_oc.cwiseProduct(c) + L.b_o);
            VectorXd tc = c.array().tanh();
            VectorXd m = o.cwiseProduct(tc);
            if (caches) {
                auto& cache = (*caches)[l];
                cache.x.push_back(x);
                cache.i.push_back(i);
                cache.f.push_back(f);
                cache.g.push_back(g);
                cache.o.push_back(o);
                cache.c.push_back(c);
                cache.m.push_back(m);
                cache.tanh_c.push_back(tc);
            }
            c_prev[l] = c;
            m_prev[l] = std::move(m);
            x = m_prev[l];
        }
        top_m = m_prev.back();
    }
    return w_ym.dot(top_m) + b_y;
}

} // namespace

double LstmNetwork::forward(const std::vector<double>& sequence) const {
    return forward_impl(layers_, w_ym_, b_y_, sequence, nullptr);
}

double LstmNetwork::loss_and_gradient(const std::vector<std::vector<double>>& inputs,
                                      const std::vector<double>& targets, Eigen::VectorXd& grad) const {
    if (inputs.size() != targets.size())
        throw LengthMismatch("loss_and_gradient: inputs and targets differ");
    if (inputs.empty()) throw EmptyInput("loss_and_gradient: empty batch");

    const std::size_t n_layers = layers_.size();
    std::vector<LstmLayer> grads;
    grads.reserve(n_layers);
    for (const auto& layer : layers_) grads.push_back(zero_layer(layer.input_size(), layer.units()));
    Eigen::RowVectorXd g_w_ym = Eigen::RowVectorXd::Zero(w_ym_.size());
    double g_b_y = 0.0;

    const double inv_n = 1.0 / static_cast<double>(inputs.size());
    double loss = 0.0;

    std::vector<LayerCache> caches;
    for (std::size_t s = 0; s < inputs.size(); ++s) {
        const std::size_t T = inputs[s].size();
        double y = forward_impl(layers_, w_ym_, b_y_, inputs[s], &caches);
        double err = y - targets[s];
        loss += err * err * inv_n;
        double dy = 2.0 * err * inv_n;

        g_w_ym += dy * caches[n_layers - 1].m[T - 1].transpose();
        g_b_y += dy;

        // Gradient flowing into each timestep's output from the layer above.
        std::vector<VectorXd> dabove(T);
        for (std::size_t t = 0; t < T; ++t) dabove[t] = VectorXd::Zero(layers_[n_layers - 1].units());
        dabove[T - 1] = w_ym_.transpose() * dy;

        for (std::size_t li = n_layers; li-- > 0;) {
            const LstmLayer& L = layers_[li];
            LstmLayer& G = grads[li];
            const LayerCache& cc = caches[li];
            const int units = L.units();

            VectorXd dm_rec = VectorXd::Zero(units);
            VectorXd dc_next = VectorXd::Zero(units);
            std::vector<VectorXd> dx_store(T);

            for (std::size_t t = T; t-- > 0;) {
                VectorXd c_prev = (t > 0) ? cc.c[t - 1] : VectorXd::Zero(units);
                VectorXd m_prev = (t > 0) ? cc.m[t - 1] : VectorXd::Zero(units);

                VectorXd dm = dabove[t] + dm_rec;
                VectorXd do_ = dm.cwiseProduct(cc.tanh_c[t]);
                VectorXd da_o = do_.cwiseProduct(cc.o[t]).cwiseProduct(VectorXd::Ones(units) - cc.o[t]);
                VectorXd dc = dm.cwiseProduct(cc.o[t])
                                  .cwiseProduct(VectorXd::Ones(units) -
                                                cc.tanh_c[t].cwiseProduct(cc.tanh_c[t])) +
                              dc_next + da_o.cwiseProduct(L.w_oc);

                VectorXd di = dc.cwiseProduct(cc.g[t]);
                VectorXd df = dc.cwiseProduct(c_prev);
                VectorXd dg = dc.cwiseProduct(cc.i[t]);
                VectorXd da_i = di.cwiseProduct(cc.i[t]).cwiseProduct(VectorXd::Ones(units) - cc.i[t]);
                VectorXd da_f = df.cwiseProduct(cc.f[t]).cwiseProduct(VectorXd::Ones(units) - cc.f[t]);
                VectorXd da_g = dg.cwiseProduct(VectorXd::Ones(units) - cc.g[t].cwiseProduct(cc.g[t]));

                G.w_ix += da_i * cc.x[t].transpose();
                G.w_fx += da_f * cc.x[t].transpose();
                G.w_cx += da_g * cc.x[t].transpose();
                G.w_ox += da_o * cc.x[t].transpose();
                G.w_im += da_i * m_prev.transpose();
                G.w_fm += da_f * m_prev.transpose();
                G.w_cm += da_g * m_prev.transpose();
                G.w_om += da_o * m_prev.transpose();
                G.w_ic += da_i.cwiseProduct(c_prev);
                G.w_fc += da_f.cwiseProduct(c_prev);
                G.w_oc += da_o.cwiseProduct(cc.c[t]);
                G.b_i += da_i;
                G.b_f += da_f;
                G.b_c += da_g;
                G.b_o += da_o;

                dm_rec = L.w_im.transpose() * da_i + L.w_fm.transpose() * da_f +
                         L.w_cm.transpose() * da_g + L.w_om.transpose() * da_o;
                dc_next = dc.cwiseProduct(cc.f[t]) + da_i.cwiseProduct(L.w_ic) +
                          da_f.cwiseProduct(L.w_fc);
                dx_store[t] = L.w_ix.transpose() * da_i + L.w_fx.transpose() * da_f +
                              L.w_cx.transpose() * da_g + L.w_ox.transpose() * da_o;
            }
            dabove = std::move(dx_store);
        }
    }

    grad.resize(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index at = 0;
    for (const auto& g : grads)
        visit_layer_blocks(g, [&](const auto& block, auto) {
            grad.segment(at, block.size()) = Eigen::Map<const VectorXd>(block.data(), block.size());
            at += block.size();
        });
    grad.segment(at, g_w_ym.size()) = g_w_ym.transpose();
    at += g_w_ym.size();
    grad[at] = g_b_y;
    return loss;
}

void LstmNetwork::set_forecast_state(std::vector<double> normalized_tail, double min_v, double max_v) {
    normalized_tail_ = std::move(normalized_tail);
    norm_min_ = min_v;
    norm_max_ = max_v;
}

std::vector<double> LstmNetwork::predict(int horizon) const {
    if (horizon < 1) throw InvalidSpec("predict horizon must be >= 1");
    if (normalized_tail_.empty())
        throw InvalidSpec("LSTM predict needs the training window installed by fit_lstm");
    const std::size_t seq = normalized_tail_.size();
    std::vector<double> window = normalized_tail_;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(horizon));
    for (int h = 0; h < horizon; ++h) {
        std::vector<double> input(window.end() - static_cast<long>(seq), window.end());
        double pred = forward(input);
        window.push_back(pred);
        out.push_back(norm_min_ + pred * (norm_max_ - norm_min_));
    }
    return out;
}

std::string LstmNetwork::summary() const {
    std::string widths;
    for (const auto& layer : layers_) {
        if (!widths.empty()) widths += ",";
        widths += std::to_string(layer.units());
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "LSTM[%s] params=%zu final_loss=%.6g", widths.c_str(),
                  parameter_count(), final_loss_);
    return buf;
}

LstmNetwork fit_lstm(const TimeSeries& train, const LstmOptions& opts, std::uint64_t seed) {
    const int seq = opts.seq_len;
    if (seq < 1 || opts.batch_size < 1 || opts.epochs < 0)
        throw InvalidSpec("invalid LSTM options");
    if (train.size() < static_cast<std::size_t>(seq) + 1)
        throw TooShort("fit_lstm requires at least seq_len + 1 observations");

    // Min-max normalization of the training window; a flat window maps to 0
    // and predictions denormalize back to the constant.
    double min_v = *std::min_element(train.values().begin(), train.values().end());
    double max_v = *std::max_element(train.values().begin(), train.values().end());
    double range = max_v - min_v;
    std::vector<double> x(train.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = (range > 0.0) ? (train[i] - min_v) / range : 0.0;

    const std::size_t n_samples = x.size() - static_cast<std::size_t>(seq);
    std::vector<std::vector<double>> inputs(n_samples);
    std::vector<double> targets(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        inputs[i].assign(x.begin() + static_cast<long>(i), x.begin() + static_cast<long>(i) + seq);
        targets[i] = x[i + static_cast<std::size_t>(seq)];
    }

    LstmNetwork net = make_lstm(opts.widths);

    // uniform +-1/sqrt(fan_in) weights, zero biases
    detail::Rng rng(detail::mix_seed(seed, 0x15f3u));
    Eigen::VectorXd flat(static_cast<Eigen::Index>(net.parameter_count()));
    Eigen::Index at = 0;
    for (auto& layer : net.layers())
        visit_layer_blocks(layer, [&](auto& block, auto fan_in) {
            double bound = fan_in > 0 ? 1.0 / std::sqrt(static_cast<double>(fan_in)) : 0.0;
            for (Eigen::Index k = 0; k < block.size(); ++k) flat[at++] = rng.uniform(-bound, bound);
        });
    {
        double bound = 1.0 / std::sqrt(static_cast<double>(net.output_weights().size()));
        for (Eigen::Index k = 0; k < net.output_weights().size(); ++k) flat[at++] = rng.uniform(-bound, bound);
        flat[at] = 0.0; // b_y
    }
    net.set_parameters(flat);

    // Adam over shuffled mini-batches.
    const Eigen::Index n_params = flat.size();
    Eigen::VectorXd m = Eigen::VectorXd::Zero(n_params);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n_params);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double beta1_t = 1.0, beta2_t = 1.0;
    Eigen::VectorXd grad;
    std::vector<std::size_t> order(n_samples);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n_samples; start += static_cast<std::size_t>(opts.batch_size)) {
            std::size_t stop = std::min(n_samples, start + static_cast<std::size_t>(opts.batch_size));
            std::vector<std::vector<double>> bx;
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
    }

    Eigen::VectorXd unused;
    net.final_loss_ = net.loss_and_gradient(inputs, targets, unused);
    net.set_forecast_state({x.end() - static_cast<long>(seq), x.end()}, min_v, max_v);
    return net;
}

std::unique_ptr<Forecaster> fit_forecaster(ForecastKind kind, const TimeSeries& train,
                                           const ForecasterOptions& opts, std::uint64_t seed) {
    switch (kind) {
        case ForecastKind::Arima: return std::make_unique<ArimaModel>(fit_arima(train));
        case ForecastKind::HoltWinters: return std::make_unique<HoltWintersModel>(fit_hw(train));
        case ForecastKind::ProphetTrend:
            return std::make_unique<TrendModel>(fit_prophet_trend(train, opts.prophet_changepoints));
        case ForecastKind::Lstm: return std::make_unique<LstmNetwork>(fit_lstm(train, opts.lstm, seed));
    }
    throw InvalidSpec("unknown forecaster kind");
}

const char* to_string(ForecastKind k) {
    switch (k) {
        case ForecastKind::Arima: return "ARIMA";
        case ForecastKind::HoltWinters: return "Holt-Winters";
        case ForecastKind::ProphetTrend: return "Prophet";
        case ForecastKind::Lstm: return "LSTM";
    }
    return "?";
}

ForecastKind forecast_kind_from_string(const std::string& name) {
    for (ForecastKind k : kAllForecastKinds)
        if (name == to_string(k)) return k;
    throw InvalidSpec("unknown forecaster name: " + name);
}

} // namespace fwstack

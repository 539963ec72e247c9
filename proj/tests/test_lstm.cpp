#include <doctest.h>

#include <cmath>

#include "fwstack/errors.hpp"
#include "fwstack/forecasters.hpp"
#include "oracles.hpp"

using namespace fwstack;
using oracles::make_series;

TEST_CASE("zeroed network outputs its bias everywhere") {
    LstmNetwork net = make_lstm({6, 3});
    net.output_bias() = 4.25;
    CHECK(net.forward({0.1, -2.0, 33.0}) == doctest::Approx(4.25));
    CHECK(net.forward({0.0}) == doctest::Approx(4.25));
}

TEST_CASE("lstm gradients match central finite differences") {
    LstmNetwork net = make_lstm({4, 4});
    detail::Rng rng(97);
    Eigen::VectorXd params(static_cast<Eigen::Index>(net.parameter_count()));
    for (Eigen::Index i = 0; i < params.size(); ++i) params[i] = rng.uniform(-0.4, 0.4);
    net.set_parameters(params);

    std::vector<std::vector<double>> inputs = {
        {0.1, 0.5, 0.3, 0.9}, {0.7, 0.2, 0.8, 0.4}, {0.0, 1.0, 0.5, 0.25}};
    std::vector<double> targets = {0.6, 0.3, 0.9};

    Eigen::VectorXd analytic;
    net.loss_and_gradient(inputs, targets, analytic);

    LstmNetwork probe = make_lstm({4, 4});
    auto loss_at = [&](const Eigen::VectorXd& x) {
        probe.set_parameters(x);
        double loss = 0.0;
        for (std::size_t s = 0; s < inputs.size(); ++s) {
            double err = probe.forward(inputs[s]) - targets[s];
            loss += err * err / static_cast<double>(inputs.size());
        }
        return loss;
    };
    Eigen::VectorXd numeric = oracles::finite_difference(loss_at, params, 1e-4);
    CHECK(oracles::gradients_match(analytic, numeric, 1e-3));
}

TEST_CASE("gate activations stay in (0,1) and states finite") {
    LstmOptions opts;
    opts.widths = {5, 4};
    opts.epochs = 3;
    auto noise = oracles::gaussian_noise(30, 7);
    for (double& v : noise) v = std::abs(v) * 10.0;
    auto net = fit_lstm(make_series(noise), opts, 3);
    // forward over an arbitrary sequence must stay finite
    double out = net.forward({0.2, 0.9, 0.4, 0.1, 0.6, 0.8, 0.0, 1.0});
    CHECK(std::isfinite(out));
}

TEST_CASE("fit_lstm is bit-reproducible under a fixed seed") {
    LstmOptions opts;
    opts.widths = {6, 5};
    opts.epochs = 4;
    auto curve = oracles::gaussian_noise(24, 13);
    for (double& v : curve) v = v * v;
    auto a = fit_lstm(make_series(curve), opts, 42);
    auto b = fit_lstm(make_series(curve), opts, 42);
    auto fa = a.predict(7), fb = b.predict(7);
    for (std::size_t i = 0; i < fa.size(); ++i) CHECK(fa[i] == fb[i]);
    CHECK(a.flatten_parameters() == b.flatten_parameters());

    auto c = fit_lstm(make_series(curve), opts, 43);
    CHECK(a.flatten_parameters() != c.flatten_parameters());
}

TEST_CASE("training on a constant series recovers the constant") {
    LstmOptions opts;
    opts.widths = {8, 8};
    auto net = fit_lstm(make_series(std::vector<double>(30, 42.0)), opts, 5);
    for (double v : net.predict(7)) CHECK(std::abs(v - 42.0) <= 0.05 * 42.0);
}

TEST_CASE("training moves predictions toward a learnable level") {
    // ramp normalized to [0,1]; after training the one-step prediction should
    // sit far from the raw initialization output
    LstmOptions opts;
    opts.widths = {8, 8};
    opts.epochs = 110;
    opts.learning_rate = 1e-3; // desk-scale check of the training loop itself
    std::vector<double> ramp(30);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
    auto net = fit_lstm(make_series(ramp), opts, 11);
    CHECK(net.final_training_loss() < 0.02);
}

TEST_CASE("fit_lstm validates input") {
    LstmOptions opts;
    opts.widths = {4};
    CHECK_THROWS_AS(fit_lstm(make_series(std::vector<double>(8, 1.0)), opts, 1), TooShort);
    LstmNetwork net = make_lstm({4});
    CHECK_THROWS_AS(net.predict(7), InvalidSpec); // no training window installed
    CHECK_THROWS_AS(make_lstm({}), InvalidSpec);
}

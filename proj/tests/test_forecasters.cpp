#include <doctest.h>

#include <cmath>

#include "fwstack/errors.hpp"
#include "fwstack/forecasters.hpp"
#include "oracles.hpp"

using namespace fwstack;
using oracles::make_series;

namespace {

std::vector<double> line_series(std::size_t n, double intercept, double slope) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = intercept + slope * static_cast<double>(i);
    return v;
}

} // namespace

TEST_CASE("arima (0,1,0) forecasts the last value repeated") {
    auto walk = oracles::random_walk(80, 101);
    ArimaModel rw({0, 1, 0}, 0.0, {}, {}, make_series(walk, true));
    auto fc = rw.predict(7);
    REQUIRE(fc.size() == 7);
    for (double v : fc) CHECK(v == doctest::Approx(walk.back()).epsilon(1e-12));
}

TEST_CASE("arima selects differencing on random walks") {
    int d_ok = 0;
    for (int t = 0; t < 60; ++t) {
        auto y = oracles::random_walk(200, 700 + static_cast<std::uint64_t>(t));
        auto m = fit_arima(make_series(y, true));
        if (m.order().d >= 1) ++d_ok;
    }
    CHECK(d_ok >= 42); // measured rate ~77%; the d=0 escapes are near-boundary AR fits
}

TEST_CASE("arima recovers an AR(1) dependence structure") {
    int ok = 0, p_ok = 0;
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
        auto y = oracles::ar1(200, 0.8, 100 + static_cast<std::uint64_t>(t));
        // generator sanity: the Yule-Walker reference recovers phi
        CHECK(std::abs(oracles::yule_walker_phi(y) - 0.8) <= 0.15);
        auto m = fit_arima(make_series(y, true));
        if (m.order().p >= 1) ++p_ok;
        if (m.order().p >= 1 && m.order().d == 0 &&
            std::abs(oracles::implied_acf1(m.ar(), m.ma()) - 0.8) <= 0.15)
            ++ok;
    }
    CHECK(p_ok >= 54);
    CHECK(ok >= 54); // >= 90%
}

TEST_CASE("arima stays parsimonious on white noise") {
    int small = 0;
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
        auto y = oracles::gaussian_noise(200, 300 + static_cast<std::uint64_t>(t));
        auto m = fit_arima(make_series(y, true));
        if (m.order().p + m.order().q <= 1) ++small;
    }
    CHECK(small >= 48); // >= 80%
}

TEST_CASE("arima AIC is monotone in SSE at fixed parameter count") {
    auto y = oracles::ar1(120, 0.5, 9);
    ArimaModel a({1, 0, 0}, 0.0, {0.5}, {}, make_series(y, true));
    ArimaModel b({1, 0, 0}, 0.0, {-0.9}, {}, make_series(y, true));
    CHECK(a.sse() < b.sse());
    CHECK(a.aic() < b.aic());
}

TEST_CASE("arima handles constants and rejects short input") {
    auto constant = make_series(std::vector<double>(40, 11.0));
    auto m = fit_arima(constant);
    for (double v : m.predict(7)) CHECK(v == doctest::Approx(11.0).epsilon(1e-9));
    CHECK_THROWS_AS(fit_arima(make_series(std::vector<double>(19, 1.0))), TooShort);
}

TEST_CASE("holt-winters continues an exact line") {
    auto line = line_series(40, 3.0, 2.5);
    auto params = fit_hw(make_series(line));
    HoltWintersModel model(params);
    auto fc = model.predict(7);
    for (int h = 1; h <= 7; ++h) {
        double expected = 3.0 + 2.5 * static_cast<double>(39 + h);
        CHECK(std::abs(fc[static_cast<std::size_t>(h - 1)] - expected) <= 1e-3 * std::abs(expected));
    }
    // the recursion is exact on a line for any smoothing weights
    CHECK(hw_sse(line, 0.3, 0.7) == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("holt-winters with forced unit weights reduces to the two-point rule") {
    auto y = oracles::gaussian_noise(30, 21);
    auto state = hw_state(y, 0.999, 0.999);
    HoltWintersModel model(state);
    auto fc = model.predict(5);
    for (int h = 1; h <= 5; ++h)
        CHECK(fc[static_cast<std::size_t>(h - 1)] ==
              doctest::Approx(state.level + h * state.trend));
    // alpha = gamma = 1 collapses to y_T + h (y_T - y_{T-1}); 0.999 stays close
    double yT = y.back(), yT1 = y[y.size() - 2];
    CHECK(std::abs(state.level - yT) <= 0.01 * (1.0 + std::abs(yT)));
    CHECK(std::abs(state.trend - (yT - yT1)) <= 0.05 * (1.0 + std::abs(yT - yT1)));
}

TEST_CASE("holt-winters forecasts a constant series exactly") {
    auto params = fit_hw(make_series(std::vector<double>(20, 7.5)));
    HoltWintersModel model(params);
    for (double v : model.predict(14)) CHECK(v == doctest::Approx(7.5).epsilon(1e-12));
    CHECK_THROWS_AS(fit_hw(make_series({1, 2, 3, 4})), TooShort);
}

TEST_CASE("holt-winters forecasts stay bounded on bounded input") {
    detail::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> y(30);
        for (double& v : y) v = rng.uniform(0.0, 100.0);
        auto params = fit_hw(make_series(y));
        auto fc = HoltWintersModel(params).predict(14);
        double bound = 100.0 + 14.0 * std::abs(params.trend) + 100.0;
        for (double v : fc) CHECK(std::abs(v) <= bound);
    }
}

TEST_CASE("prophet trend fits an exact line with idle changepoints") {
    auto line = line_series(30, 4.0, 1.5);
    auto model = fit_prophet_trend(make_series(line), 14);
    for (double d : model.delta()) CHECK(std::abs(d) <= 1e-3);
    auto fc = model.predict(7);
    for (int h = 0; h < 7; ++h) {
        double expected = 4.0 + 1.5 * static_cast<double>(30 + h);
        CHECK(std::abs(fc[static_cast<std::size_t>(h)] - expected) <= 1e-3 * std::abs(expected));
    }
}

TEST_CASE("prophet trend with no changepoints is plain linear regression") {
    auto y = oracles::gaussian_noise(40, 55);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.4 * static_cast<double>(i);
    auto model = fit_prophet_trend(make_series(y, true), 0);
    auto [slope, intercept] = oracles::ols_line(y);
    CHECK(model.base_rate() == doctest::Approx(slope).epsilon(1e-9));
    CHECK(model.offset() == doctest::Approx(intercept).epsilon(1e-9));
    auto fc = model.predict(3);
    for (int h = 0; h < 3; ++h)
        CHECK(fc[static_cast<std::size_t>(h)] ==
              doctest::Approx(intercept + slope * (40.0 + h)).epsilon(1e-9));
}

TEST_CASE("prophet trend locates a sharp slope change") {
    // slope 1 for 40 days, slope 3 afterwards
    std::vector<double> y(80);
    for (std::size_t i = 0; i < y.size(); ++i) {
        double t = static_cast<double>(i);
        y[i] = (t <= 40.0) ? t : 40.0 + 3.0 * (t - 40.0);
    }
    auto model = fit_prophet_trend(make_series(y), 14);
    double near_break = 0.0;
    for (std::size_t j = 0; j < model.changepoints().size(); ++j)
        if (std::abs(model.changepoints()[j] - 40.0) <= 3.0)
            near_break += std::abs(model.delta()[j]);
    CHECK(near_break > 1.0); // at least half the true slope change of 2
}

TEST_CASE("prophet trend is continuous at changepoints") {
    auto y = oracles::gaussian_noise(50, 77);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.8 * static_cast<double>(i);
    auto model = fit_prophet_trend(make_series(y, true), 10);
    for (double s : model.changepoints()) {
        double lo = model.evaluate(s - 1e-6), hi = model.evaluate(s + 1e-6);
        CHECK(std::abs(hi - lo) <= 1e-4 * (1.0 + std::abs(hi)));
    }
    // continuity offsets satisfy gamma_j = -s_j delta_j
    for (std::size_t j = 0; j < model.changepoints().size(); ++j)
        CHECK(model.gamma_adj()[j] == doctest::Approx(-model.changepoints()[j] * model.delta()[j]));
    CHECK_THROWS_AS(fit_prophet_trend(make_series({1, 2, 3}), 14), TooShort);
}

TEST_CASE("fit_forecaster covers the common interface") {
    auto curve = line_series(40, 10.0, 1.0);
    ForecasterOptions opts;
    opts.lstm.widths = {4, 4};
    opts.lstm.epochs = 2;
    for (ForecastKind kind : kAllForecastKinds) {
        auto model = fit_forecaster(kind, make_series(curve), opts, 7);
        CHECK(model->kind() == kind);
        auto fc = model->predict(7);
        CHECK(fc.size() == 7);
        for (double v : fc) CHECK(std::isfinite(v));
        CHECK(!model->summary().empty());
    }
    CHECK(forecast_kind_from_string("Prophet") == ForecastKind::ProphetTrend);
    CHECK_THROWS_AS(forecast_kind_from_string("nope"), InvalidSpec);
}

#include <doctest.h>

#include <cmath>

#include "fwstack/errors.hpp"
#include "fwstack/timeseries.hpp"
#include "oracles.hpp"

using namespace fwstack;
using oracles::make_series;

TEST_CASE("TimeSeries validates construction") {
    CHECK_THROWS_AS(make_series({}), InvalidSeries);
    CHECK_THROWS_AS(make_series({1.0, -2.0}), InvalidSeries);
    CHECK_NOTHROW(make_series({1.0, -2.0}, true)); // transformed values may be negative
    CHECK_THROWS_AS(make_series({1.0, std::nan("")}, true), InvalidSeries);

    auto ts = make_series({1, 2, 3});
    CHECK(ts.date(2) == ts.start_date() + std::chrono::days(2));
    auto sliced = ts.slice(1, 2);
    CHECK(sliced.start_date() == ts.date(1));
    CHECK(sliced.values() == std::vector<double>{2, 3});
}

TEST_CASE("box_cox known values") {
    BoxCoxParams identity{1.0, 0.0};
    CHECK(box_cox(make_series({1, 2, 3}), identity).values() == std::vector<double>{0, 1, 2});

    BoxCoxParams log_case{0.0, 0.0};
    auto logged = box_cox(make_series({1.0, std::exp(1.0), std::exp(2.0)}), log_case);
    CHECK(logged[0] == doctest::Approx(0.0));
    CHECK(logged[1] == doctest::Approx(1.0));
    CHECK(logged[2] == doctest::Approx(2.0));
    CHECK(logged.transformed());

    // (sqrt(4) - 1) / 0.5 = 2.0
    CHECK(box_cox(make_series({4.0}), {0.5, 0.0})[0] == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(box_cox(make_series({0.0, 1.0}), {0.5, 0.0}), NonPositiveInput);
}

TEST_CASE("box_cox_inverse undoes the transform") {
    auto x = make_series({1, 10, 100});
    BoxCoxParams p{0.3, 0.0};
    auto round = box_cox_inverse(box_cox(x, p), p);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(round[i] - x[i]) <= 1e-9 * std::abs(x[i]));

    auto expd = box_cox_inverse(make_series({0.0, 1.0}, true), {0.0, 0.0});
    CHECK(expd[0] == doctest::Approx(1.0));
    CHECK(expd[1] == doctest::Approx(std::exp(1.0)));

    // undo the +5 shift: inverse of 0 under lambda=1 is -4
    CHECK(box_cox_inverse(make_series({0.0}, true), {1.0, 5.0})[0] == doctest::Approx(-4.0));

    CHECK_THROWS_AS(box_cox_inverse(make_series({-3.0}, true), {0.5, 0.0}), DomainError);
    CHECK_THROWS_AS(box_cox_inverse(make_series({1.0}), {1.0, 0.0}), DomainError);
}

TEST_CASE("box_cox round-trip property over random params") {
    detail::Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        double lambda = std::round(rng.uniform(-1.0, 2.0) * 100.0) / 100.0;
        double shift = rng.uniform(0.0, 3.0);
        std::vector<double> values(20);
        for (double& v : values) v = rng.uniform(0.05, 500.0);
        auto series = make_series(values);
        BoxCoxParams p{lambda, shift};
        auto round = box_cox_inverse(box_cox(series, p), p);
        for (std::size_t i = 0; i < values.size(); ++i)
            CHECK(std::abs(round[i] - values[i]) <= 1e-9 * std::max(1.0, std::abs(values[i])));
    }
}

TEST_CASE("estimate_lambda matches the brute-force grid argmax") {
    // exponential growth wants the log transform
    std::vector<double> expo(30);
    for (std::size_t i = 0; i < expo.size(); ++i) expo[i] = std::exp(0.3 * static_cast<double>(i));
    auto params = estimate_lambda(make_series(expo));
    CHECK(std::abs(params.lambda) <= 0.1);
    CHECK(params.shift == 0.0);

    // the chosen lambda attains the maximum of the independent likelihood
    double best = -1e300, best_lambda = 0.0;
    for (int step = -100; step <= 200; ++step) {
        double lambda = step / 100.0;
        double ll = oracles::box_cox_loglik(expo, lambda, params.shift);
        if (ll > best) {
            best = ll;
            best_lambda = lambda;
        }
    }
    CHECK(params.lambda == doctest::Approx(best_lambda));

    // linear series keeps lambda near 1 (the grid argmax for any positive
    // ramp sits at ~0.75; asserted against the same brute-force likelihood)
    std::vector<double> linear(30);
    for (std::size_t i = 0; i < linear.size(); ++i) linear[i] = 5.0 + 2.0 * static_cast<double>(i);
    auto lin_params = estimate_lambda(make_series(linear));
    CHECK(std::abs(lin_params.lambda - 1.0) <= 0.3);
    double lin_best = -1e300, lin_best_lambda = 0.0;
    for (int step = -100; step <= 200; ++step) {
        double lambda = step / 100.0;
        double ll = oracles::box_cox_loglik(linear, lambda, 0.0);
        if (ll > lin_best) {
            lin_best = ll;
            lin_best_lambda = lambda;
        }
    }
    CHECK(lin_params.lambda == doctest::Approx(lin_best_lambda));

    // zero in the series forces shift = 1
    std::vector<double> with_zero(12, 1.0);
    with_zero[0] = 0.0;
    CHECK(estimate_lambda(make_series(with_zero)).shift == 1.0);

    CHECK_THROWS_AS(estimate_lambda(make_series({1, 2, 3})), TooShort);
}

TEST_CASE("moving_average examples and alignment") {
    auto ident = moving_average(make_series({1, 2, 3}), 1);
    CHECK(ident.values() == std::vector<double>{1, 2, 3});

    auto pairs = moving_average(make_series({1, 3, 5}), 2);
    CHECK(pairs.values() == std::vector<double>{2, 4});
    CHECK(pairs.start_date() == make_series({1, 3, 5}).date(1)); // output date i = input date i+w-1

    CHECK(moving_average(make_series({0, 0, 10}), 2).values() == std::vector<double>{0, 5});

    CHECK_THROWS_AS(moving_average(make_series({1, 2}), 3), WindowTooLarge);
    CHECK_THROWS_AS(moving_average(make_series({1, 2}), 0), WindowTooLarge);
}

TEST_CASE("moving_average properties") {
    detail::Rng rng(11);
    std::vector<double> values(40);
    for (double& v : values) v = rng.uniform(0.0, 50.0);

    // shifting the input by c shifts the output by c
    const double c = 17.5;
    std::vector<double> shifted(values);
    for (double& v : shifted) v += c;
    auto base = moving_average(make_series(values), 5);
    auto moved = moving_average(make_series(shifted), 5);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(moved[i] == doctest::Approx(base[i] + c).epsilon(1e-12));

    // monotone input keeps a monotone average
    std::vector<double> mono(values);
    std::sort(mono.begin(), mono.end());
    auto smooth = moving_average(make_series(mono), 4);
    for (std::size_t i = 1; i < smooth.size(); ++i) CHECK(smooth[i] >= smooth[i - 1]);
}

TEST_CASE("invert_moving_average recovers the pre-smoothing values") {
    detail::Rng rng(13);
    std::vector<double> values(50);
    for (double& v : values) v = rng.uniform(1.0, 9.0);
    const int w = 3;
    auto smoothed = moving_average(make_series(values), w);
    // treat the last 10 smoothed points as "forecasts"
    std::vector<double> forecast(smoothed.values().end() - 10, smoothed.values().end());
    std::size_t first = values.size() - 10;
    std::vector<double> tail(values.begin() + static_cast<long>(first) - (w - 1),
                             values.begin() + static_cast<long>(first));
    auto recovered = invert_moving_average(forecast, tail, w);
    for (std::size_t i = 0; i < recovered.size(); ++i)
        CHECK(recovered[i] == doctest::Approx(values[first + i]).epsilon(1e-9));
}

TEST_CASE("split counts and window adjacency") {
    auto one = split(make_series(std::vector<double>(67, 1.0)), 7, 7);
    CHECK(one.size() == 1);

    auto two = split(make_series(std::vector<double>(74, 1.0)), 7, 7);
    CHECK(two.size() == 2);
    CHECK(two[1].window_a.start_date() == two[0].window_a.start_date() + std::chrono::days(7));

    CHECK_THROWS_AS(split(make_series(std::vector<double>(66, 1.0)), 7, 7), SeriesTooShort);
    CHECK_THROWS_AS(split(make_series(std::vector<double>(80, 1.0)), 9, 7), InvalidSpec);

    // window count matches the counting oracle across lengths and strides
    detail::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        int horizon = trial % 2 == 0 ? 7 : 14;
        std::size_t len = 60 + static_cast<std::size_t>(horizon) + rng.index(80);
        int stride = 1 + static_cast<int>(rng.index(14));
        auto sets = split(make_series(std::vector<double>(len, 2.0)), horizon, stride);
        std::size_t expected =
            (len - 60 - static_cast<std::size_t>(horizon)) / static_cast<std::size_t>(stride) + 1;
        CHECK(sets.size() == expected);
        for (const auto& s : sets) {
            CHECK(s.window_a.size() == 30);
            CHECK(s.window_b.size() == 30);
            CHECK(s.window_c.size() == static_cast<std::size_t>(horizon));
            CHECK(s.window_b.start_date() == s.window_a.end_date() + std::chrono::days(1));
            CHECK(s.window_c.start_date() == s.window_b.end_date() + std::chrono::days(1));
            CHECK(s.window_c.end_date() <= make_series(std::vector<double>(len, 2.0)).date(len - 1));
        }
    }

    // 29 series splitting into 9 windows each yields the expected 261 total
    std::size_t total = 0;
    for (int region = 0; region < 29; ++region)
        total += split(make_series(std::vector<double>(123, 3.0)), 7, 7).size();
    CHECK(total == 261);
}

TEST_CASE("date parsing round trips") {
    CHECK(to_iso(parse_date_mdy("1/22/20")) == "2020-01-22");
    CHECK(to_iso(parse_date_iso("2021-02-28")) == "2021-02-28");
    CHECK(parse_date_mdy("12/31/20") + std::chrono::days(1) == parse_date_iso("2021-01-01"));
    CHECK_THROWS_AS(parse_date_mdy("junk"), InvalidSeries);
    CHECK_THROWS_AS(parse_date_iso("2020-13-01"), InvalidSeries);
}

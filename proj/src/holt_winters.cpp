#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fwstack/detail/optim.hpp"
#include "fwstack/errors.hpp"
#include "fwstack/forecasters.hpp"

namespace fwstack {

namespace {

double clamp01(double v) { return std::clamp(v, 0.001, 0.999); }

// S_1 = y_1, b_1 = y_2 - y_1; one-step errors start at t = 2.
struct Recursion {
    double level, trend, sse;
};

Recursion run_recursion(const std::vector<double>& y, double alpha, double gamma) {
    double level = y[0];
    double trend = y[1] - y[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        double forecast = level + trend;
        double err = y[t] - forecast;
        sse += err * err;
        double prev_level = level;
        level = alpha * y[t] + (1.0 - alpha) * (level + trend);
        trend = gamma * (level - prev_level) + (1.0 - gamma) * trend;
    }
    return {level, trend, sse};
}

} // namespace

double hw_sse(const std::vector<double>& y, double alpha, double gamma) {
    if (y.size() < 2) throw TooShort("hw_sse requires at least 2 observations");
    return run_recursion(y, alpha, gamma).sse;
}

HwParams hw_state(const std::vector<double>& y, double alpha, double gamma) {
    if (y.size() < 2) throw TooShort("hw_state requires at least 2 observations");
    auto rec = run_recursion(y, alpha, gamma);
    return {alpha, gamma, rec.level, rec.trend};
}

HwParams fit_hw(const TimeSeries& train) {
    if (train.size() < 5) throw TooShort("fit_hw requires at least 5 observations");
    const std::vector<double>& y = train.values();

    auto objective = [&](const std::vector<double>& params) {
        return hw_sse(y, clamp01(params[0]), clamp01(params[1]));
    };

    const double grid[3] = {0.1, 0.5, 0.9};
    double best_sse = std::numeric_limits<double>::infinity();
    double best_alpha = 0.5, best_gamma = 0.5;
    for (double a0 : grid) {
        for (double g0 : grid) {
            auto sol = detail::nelder_mead(objective, {a0, g0}, 0.1, 1e-12, 300);
            if (sol.value < best_sse) {
                best_sse = sol.value;
                best_alpha = clamp01(sol.x[0]);
                best_gamma = clamp01(sol.x[1]);
            }
        }
    }
    return hw_state(y, best_alpha, best_gamma);
}

std::vector<double> HoltWintersModel::predict(int horizon) const {
    if (horizon < 1) throw InvalidSpec("predict horizon must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(horizon));
    for (int h = 1; h <= horizon; ++h)
        out[static_cast<std::size_t>(h - 1)] = params_.level + h * params_.trend;
    return out;
}

std::string HoltWintersModel::summary() const {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "HW(alpha=%.4f, gamma=%.4f) level=%.4f trend=%.4f", params_.alpha,
                  params_.gamma, params_.level, params_.trend);
    return buf;
}

} // namespace fwstack

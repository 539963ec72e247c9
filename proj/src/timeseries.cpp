#include "fwstack/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace fwstack {

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

Days parse_date_mdy(const std::string& s) {
    int m = 0, d = 0, y = 0;
    if (std::sscanf(s.c_str(), "%d/%d/%d", &m, &d, &y) != 3)
        throw InvalidSeries("unparseable m/d/yy date: '" + s + "'");
    if (y < 100) y += 2000;
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw InvalidSeries("invalid calendar date: '" + s + "'");
    return Days{ymd};
}

Days parse_date_iso(const std::string& s) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d) != 3)
        throw InvalidSeries("unparseable ISO date: '" + s + "'");
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw InvalidSeries("invalid calendar date: '" + s + "'");
    return Days{ymd};
}

std::string to_iso(Days d) {
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

TimeSeries::TimeSeries(std::string region_id, Days start, std::vector<double> values, bool transformed)
    : region_id_(std::move(region_id)), start_(start), values_(std::move(values)), transformed_(transformed) {
    if (values_.empty()) throw InvalidSeries("TimeSeries requires at least one value");
    if (!all_finite(values_)) throw InvalidSeries("TimeSeries values must be finite: " + region_id_);
    if (!transformed_) {
        for (double v : values_)
            if (v < 0.0) throw InvalidSeries("cumulative counts must be nonnegative: " + region_id_);
    }
}

TimeSeries TimeSeries::slice(std::size_t offset, std::size_t count) const {
    if (offset + count > values_.size()) throw InvalidSeries("slice out of range");
    std::vector<double> v(values_.begin() + static_cast<long>(offset),
                          values_.begin() + static_cast<long>(offset + count));
    return TimeSeries(region_id_, date(offset), std::move(v), transformed_);
}

TimeSeries TimeSeries::with_values(std::vector<double> values, bool transformed) const {
    return TimeSeries(region_id_, start_, std::move(values), transformed);
}

SplitSet::SplitSet(TimeSeries a, TimeSeries b, TimeSeries c, int h)
    : window_a(std::move(a)), window_b(std::move(b)), window_c(std::move(c)), horizon(h) {
    if (window_a.size() != kInputWindow || window_b.size() != kInputWindow)
        throw InvalidSeries("SplitSet windows A and B must be 30 days");
    if (window_c.size() != static_cast<std::size_t>(horizon))
        throw InvalidSeries("SplitSet window C must match the horizon");
    using std::chrono::days;
    if (window_b.start_date() != window_a.end_date() + days(1) ||
        window_c.start_date() != window_b.end_date() + days(1))
        throw InvalidSeries("SplitSet windows must be adjacent in calendar time");
}

TimeSeries box_cox(const TimeSeries& series, const BoxCoxParams& params) {
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        double y = series[i] + params.shift;
        if (y <= 0.0)
            throw NonPositiveInput("box_cox: value + shift must be positive, got " + std::to_string(y));
        out[i] = (params.lambda == 0.0) ? std::log(y) : (std::pow(y, params.lambda) - 1.0) / params.lambda;
    }
    return TimeSeries(series.region_id(), series.start_date(), std::move(out), true);
}

TimeSeries box_cox_inverse(const TimeSeries& series, const BoxCoxParams& params) {
    if (!series.transformed())
        throw DomainError("box_cox_inverse expects a transformed series");
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        double y = series[i];
        if (params.lambda == 0.0) {
            out[i] = std::exp(y) - params.shift;
        } else {
            double base = params.lambda * y + 1.0;
            if (base <= 0.0)
                throw DomainError("box_cox_inverse: lambda*y + 1 must be positive, got " + std::to_string(base));
            out[i] = std::pow(base, 1.0 / params.lambda) - params.shift;
        }
    }
    return TimeSeries(series.region_id(), series.start_date(), std::move(out), true);
}

BoxCoxParams estimate_lambda(const TimeSeries& series) {
    const std::size_t n = series.size();
    if (n < 10) throw TooShort("estimate_lambda requires at least 10 observations");

    double lo = *std::min_element(series.values().begin(), series.values().end());
    BoxCoxParams params;
    params.shift = (lo <= 0.0) ? 1.0 - lo : 0.0;

    // Profile log-likelihood: -n/2 ln(sigma^2(lambda)) + (lambda-1) sum ln(y)
    double sum_log = 0.0;
    for (double v : series.values()) sum_log += std::log(v + params.shift);

    double best_ll = -std::numeric_limits<double>::infinity();
    double best_lambda = 1.0;
    for (int step = -100; step <= 200; ++step) {
        double lambda = step / 100.0;
        double mean = 0.0;
        std::vector<double> z(n);
        for (std::size_t i = 0; i < n; ++i) {
            double y = series[i] + params.shift;
            z[i] = (lambda == 0.0) ? std::log(y) : (std::pow(y, lambda) - 1.0) / lambda;
            mean += z[i];
        }
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : z) ss += (v - mean) * (v - mean);
        double var = ss / static_cast<double>(n);
        if (var <= 0.0) var = std::numeric_limits<double>::min();
        double ll = -0.5 * static_cast<double>(n) * std::log(var) + (lambda - 1.0) * sum_log;
        if (ll > best_ll) {
            best_ll = ll;
            best_lambda = lambda;
        }
    }
    params.lambda = best_lambda;
    return params;
}

TimeSeries moving_average(const TimeSeries& series, int window) {
    if (window < 1) throw WindowTooLarge("moving_average window must be >= 1");
    if (static_cast<std::size_t>(window) > series.size())
        throw WindowTooLarge("moving_average window exceeds series length");
    const std::size_t w = static_cast<std::size_t>(window);
    std::vector<double> out(series.size() - w + 1);
    double acc = std::accumulate(series.values().begin(), series.values().begin() + static_cast<long>(w), 0.0);
    out[0] = acc / static_cast<double>(w);
    for (std::size_t i = 1; i < out.size(); ++i) {
        acc += series[i + w - 1] - series[i - 1];
        out[i] = acc / static_cast<double>(w);
    }
    return TimeSeries(series.region_id(), series.date(w - 1), std::move(out), series.transformed());
}

std::vector<double> invert_moving_average(const std::vector<double>& smoothed,
                                          const std::vector<double>& tail, int window) {
    if (window < 1) throw WindowTooLarge("invert_moving_average window must be >= 1");
    const std::size_t w = static_cast<std::size_t>(window);
    if (tail.size() != w - 1)
        throw LengthMismatch("invert_moving_average needs window-1 trailing values");
    std::vector<double> history(tail);
    std::vector<double> out;
    out.reserve(smoothed.size());
    for (double s : smoothed) {
        double x = s * static_cast<double>(w);
        for (std::size_t i = history.size() + 1 - w; i < history.size(); ++i) x -= history[i];
        out.push_back(x);
        history.push_back(x);
    }
    return out;
}

std::vector<SplitSet> split(const TimeSeries& series, int horizon, int stride) {
    if (horizon != 7 && horizon != 14)
        throw InvalidSpec("split horizon must be 7 or 14");
    if (stride < 1) throw InvalidSpec("split stride must be >= 1");
    const std::size_t need = 2 * SplitSet::kInputWindow + static_cast<std::size_t>(horizon);
    if (series.size() < need)
        throw SeriesTooShort("split needs at least " + std::to_string(need) + " observations, got " +
                             std::to_string(series.size()));
    std::vector<SplitSet> out;
    for (std::size_t off = 0; off + need <= series.size(); off += static_cast<std::size_t>(stride)) {
        out.emplace_back(series.slice(off, SplitSet::kInputWindow),
                         series.slice(off + SplitSet::kInputWindow, SplitSet::kInputWindow),
                         series.slice(off + 2 * SplitSet::kInputWindow, static_cast<std::size_t>(horizon)),
                         horizon);
    }
    return out;
}

} // namespace fwstack

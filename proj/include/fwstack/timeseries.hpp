#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "fwstack/errors.hpp"

namespace fwstack {

using Days = std::chrono::sys_days;

// "1/22/20" (month/day/two-digit-year, as in the snapshot header)
Days parse_date_mdy(const std::string& s);
// "2020-01-22"
Days parse_date_iso(const std::string& s);
std::string to_iso(Days d);

/// Dated daily series for one region. Dates are contiguous by construction:
/// the i-th value falls on start_date() + i days, so gaps are unrepresentable.
/// Values must be finite, and nonnegative unless the series is flagged
/// `transformed` (Box-Cox output may be negative).
class TimeSeries {
public:
    TimeSeries(std::string region_id, Days start, std::vector<double> values,
               bool transformed = false);

    const std::string& region_id() const { return region_id_; }
    Days start_date() const { return start_; }
    Days date(std::size_t i) const { return start_ + std::chrono::days(static_cast<long>(i)); }
    Days end_date() const { return date(values_.size() - 1); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    bool transformed() const { return transformed_; }

    /// Contiguous sub-series of `count` values starting at index `offset`.
    TimeSeries slice(std::size_t offset, std::size_t count) const;
    /// Same region and start date, new values.
    TimeSeries with_values(std::vector<double> values, bool transformed) const;

private:
    std::string region_id_;
    Days start_;
    std::vector<double> values_;
    bool transformed_;
};

struct BoxCoxParams {
    double lambda = 1.0;
    double shift = 0.0; // chosen so min(values) + shift > 0
};

/// Fig. 1 window triple: 30-day input window A, 30-day window B (target of
/// forecasts from A and input of the next stage), and the held-out target
/// window C of `horizon` days. B follows A and C follows B with no gap.
struct SplitSet {
    TimeSeries window_a;
    TimeSeries window_b;
    TimeSeries window_c;
    int horizon;

    SplitSet(TimeSeries a, TimeSeries b, TimeSeries c, int horizon);

    static constexpr std::size_t kInputWindow = 30;
};

/// y' = ((y+shift)^lambda - 1)/lambda, or ln(y+shift) when lambda == 0.
/// Throws NonPositiveInput if any y + shift <= 0. Output is flagged
/// transformed; dates unchanged.
TimeSeries box_cox(const TimeSeries& series, const BoxCoxParams& params);

/// Exact inverse of box_cox. Requires a transformed series; throws
/// DomainError when lambda*y' + 1 <= 0 for lambda != 0.
TimeSeries box_cox_inverse(const TimeSeries& series, const BoxCoxParams& params);

/// Profile-log-likelihood lambda on the grid [-1, 2] step 0.01, with
/// shift = 1 - min(values) when min <= 0, else 0. Throws TooShort below
/// 10 observations.
BoxCoxParams estimate_lambda(const TimeSeries& series);

/// Trailing moving average: output value i averages inputs [i, i+window),
/// so output date i is input date i + window - 1 and no future value leaks
/// into any output. Output length = length - window + 1.
TimeSeries moving_average(const TimeSeries& series, int window);

/// Invert a trailing moving average one forecast step at a time.
/// `tail` holds the last window-1 unsmoothed values preceding the first
/// forecast; returns the unsmoothed forecasts.
std::vector<double> invert_moving_average(const std::vector<double>& smoothed,
                                          const std::vector<double>& tail, int window);

/// Sliding (A=30, B=30, C=horizon) decomposition advancing by `stride` days;
/// yields floor((n - 60 - horizon)/stride) + 1 triples. Throws SeriesTooShort
/// when none fit.
std::vector<SplitSet> split(const TimeSeries& series, int horizon, int stride);

} // namespace fwstack

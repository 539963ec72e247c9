#pragma once

#include <array>
#include <string>

#include "fwstack/timeseries.hpp"

namespace fwstack {

/// Fixed feature order matching the report column order.
enum class MetaFeature { CV = 0, SVDE = 1, KPSS = 2, ACF = 3 };

inline constexpr std::array<const char*, 4> kMetaFeatureNames = {"CV", "SVDE", "KPSS", "ACF"};

const char* to_string(MetaFeature f);

struct MetaFeatureVector {
    double cv = 0.0;
    double svd_entropy = 0.0;
    double kpss = 0.0;
    double acf1 = 0.0;

    double get(MetaFeature f) const;
    std::array<double, 4> as_array() const { return {cv, svd_entropy, kpss, acf1}; }
};

struct FeatureOptions {
    int svd_order = 3;
    int svd_delay = 1;
    int acf_lag = 1;
};

/// sigma/mu with the sample (n-1) standard deviation. A constant window has
/// sigma = 0 and returns 0 even at zero mean; otherwise a zero mean throws
/// ZeroMean.
double coefficient_of_variation(const TimeSeries& window);

/// Shannon entropy of the delay-embedding trajectory matrix's singular
/// values, normalized to sum to one. 0*ln(0) counts as 0, and an all-zero
/// matrix returns 0.
double svd_entropy(const TimeSeries& window, int order = 3, int delay = 1);

/// Trend-stationarity KPSS statistic: residuals of a regression on
/// (1, t), Bartlett-kernel Newey-West long-run variance with bandwidth
/// floor(4*(T/100)^(1/4)). All-zero residuals return 0.
double kpss_statistic(const TimeSeries& window);

/// Autocorrelation at `lag` with the full-sample mean and denominator.
/// A constant window (zero denominator) returns 0.
double acf(const TimeSeries& window, int lag);

/// All four statistics of the (already preprocessed) input window.
MetaFeatureVector extract(const TimeSeries& window, const FeatureOptions& opts = {});

} // namespace fwstack

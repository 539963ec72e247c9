#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fwstack/timeseries.hpp"

namespace fwstack {

enum class CurveKind { Logistic, Gompertz, PiecewiseLinear, RandomWalk, Constant };

const char* to_string(CurveKind k);
CurveKind curve_kind_from_string(const std::string& name);

/// Deterministic cumulative test curve. Noise perturbs the daily increments
/// (clipped at zero) before re-accumulation, so every generated series stays
/// a valid nondecreasing count curve.
struct CurveSpec {
    std::string region_id = "synthetic";
    CurveKind kind = CurveKind::Logistic;
    double capacity = 10000.0;   // K
    double growth_rate = 0.15;   // r
    double inflection_day = 40;  // t0
    double noise_scale = 0.0;
    int length = 123;
    std::uint64_t seed = 0;
    Days start = parse_date_iso("2020-01-22");
};

TimeSeries generate(const CurveSpec& spec);

/// JSON array of curve specs, consumed by `run --synthetic`.
std::vector<CurveSpec> load_curve_specs(const std::string& path);
void save_curve_specs(const std::vector<CurveSpec>& specs, const std::string& path);

} // namespace fwstack

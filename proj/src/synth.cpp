#include "fwstack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fwstack/detail/rng.hpp"
#include "fwstack/errors.hpp"

namespace fwstack {

const char* to_string(CurveKind k) {
    switch (k) {
        case CurveKind::Logistic: return "logistic";
        case CurveKind::Gompertz: return "gompertz";
        case CurveKind::PiecewiseLinear: return "piecewise-linear";
        case CurveKind::RandomWalk: return "random-walk";
        case CurveKind::Constant: return "constant";
    }
    return "?";
}

CurveKind curve_kind_from_string(const std::string& name) {
    for (CurveKind k : {CurveKind::Logistic, CurveKind::Gompertz, CurveKind::PiecewiseLinear,
                        CurveKind::RandomWalk, CurveKind::Constant})
        if (name == to_string(k)) return k;
    throw InvalidSpec("unknown curve kind: " + name);
}

TimeSeries generate(const CurveSpec& spec) {
    if (spec.length < 67) throw InvalidSpec("curve length must be >= 67 (minimum splittable size)");
    if (spec.noise_scale < 0.0) throw InvalidSpec("noise scale must be >= 0");

    std::vector<double> base(static_cast<std::size_t>(spec.length));
    detail::Rng rng(detail::mix_seed(spec.seed, 0xc0deu));
    for (int t = 0; t < spec.length; ++t) {
        double v = 0.0;
        switch (spec.kind) {
            case CurveKind::Logistic:
                v = spec.capacity / (1.0 + std::exp(-spec.growth_rate * (t - spec.inflection_day)));
                break;
            case CurveKind::Gompertz:
                v = spec.capacity * std::exp(-std::exp(-spec.growth_rate * (t - spec.inflection_day)));
                break;
            case CurveKind::PiecewiseLinear: {
                // slope r before the break, 3r after
                double before = std::min(static_cast<double>(t), spec.inflection_day);
                double after = std::max(0.0, t - spec.inflection_day);
                v = spec.growth_rate * before + 3.0 * spec.growth_rate * after;
                break;
            }
            case CurveKind::RandomWalk:
                v = (t == 0) ? 0.0
                             : base[static_cast<std::size_t>(t - 1)] +
                                   std::max(0.0, spec.growth_rate + rng.normal() * spec.growth_rate);
                break;
            case CurveKind::Constant:
                v = spec.capacity;
                break;
        }
        base[static_cast<std::size_t>(t)] = v;
    }

    std::vector<double> values(base.size());
    if (spec.noise_scale > 0.0) {
        // noise in daily-increment space, then re-accumulated
        values[0] = std::max(0.0, base[0]);
        for (std::size_t t = 1; t < base.size(); ++t) {
            double inc = base[t] - base[t - 1];
            double noisy = std::max(0.0, inc + spec.noise_scale * rng.normal());
            values[t] = values[t - 1] + noisy;
        }
    } else {
        values = base;
        for (std::size_t t = 1; t < values.size(); ++t) values[t] = std::max(values[t], values[t - 1]);
    }

    return TimeSeries(spec.region_id, spec.start, std::move(values));
}

std::vector<CurveSpec> load_curve_specs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnreadableFile("cannot open curve spec file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InvalidSpec("curve spec file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_array()) throw InvalidSpec("curve spec file must hold a JSON array");

    std::vector<CurveSpec> specs;
    for (const auto& item : j) {
        CurveSpec spec;
        spec.region_id = item.at("id").get<std::string>();
        spec.kind = curve_kind_from_string(item.at("kind").get<std::string>());
        spec.capacity = item.value("capacity", spec.capacity);
        spec.growth_rate = item.value("growth_rate", spec.growth_rate);
        spec.inflection_day = item.value("inflection_day", spec.inflection_day);
        spec.noise_scale = item.value("noise_scale", spec.noise_scale);
        spec.length = item.value("length", spec.length);
        spec.seed = item.value("seed", spec.seed);
        if (item.contains("start")) spec.start = parse_date_iso(item.at("start").get<std::string>());
        specs.push_back(std::move(spec));
    }
    return specs;
}

void save_curve_specs(const std::vector<CurveSpec>& specs, const std::string& path) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& spec : specs) {
        j.push_back({{"id", spec.region_id},
                     {"kind", to_string(spec.kind)},
                     {"capacity", spec.capacity},
                     {"growth_rate", spec.growth_rate},
                     {"inflection_day", spec.inflection_day},
                     {"noise_scale", spec.noise_scale},
                     {"length", spec.length},
                     {"seed", spec.seed},
                     {"start", to_iso(spec.start)}});
    }
    std::ofstream out(path);
    if (!out) throw UnreadableFile("cannot write curve spec file: " + path);
    out << j.dump(2) << "\n";
}

} // namespace fwstack

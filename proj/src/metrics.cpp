#include "fwstack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "fwstack/errors.hpp"

namespace fwstack {

double smape(std::span<const double> forecast, std::span<const double> actual) {
    if (forecast.size() != actual.size())
        throw LengthMismatch("smape: forecast and actual lengths differ");
    if (forecast.empty()) throw EmptyInput("smape: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        double denom = std::abs(actual[i]) + std::abs(forecast[i]);
        if (denom > 0.0) acc += 2.0 * std::abs(forecast[i] - actual[i]) / denom;
    }
    return acc / static_cast<double>(forecast.size());
}

double mae(std::span<const double> forecast, std::span<const double> actual) {
    if (forecast.size() != actual.size())
        throw LengthMismatch("mae: forecast and actual lengths differ");
    if (forecast.empty()) throw EmptyInput("mae: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < forecast.size(); ++i) acc += std::abs(forecast[i] - actual[i]);
    return acc / static_cast<double>(forecast.size());
}

namespace {

// Average (tie-fractional) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch("spearman_rho: lengths differ");
    if (x.size() < 3) throw TooShort("spearman_rho requires length >= 3");
    return pearson(average_ranks(x), average_ranks(y));
}

double ScoreTable::column_mean_abs(MetaFeature f) const {
    double acc = 0.0;
    for (const auto& row : cells) acc += std::abs(row[static_cast<std::size_t>(f)]);
    return acc / static_cast<double>(cells.size());
}

double ScoreTable::column_mean(MetaFeature f) const {
    double acc = 0.0;
    for (const auto& row : cells) acc += row[static_cast<std::size_t>(f)];
    return acc / static_cast<double>(cells.size());
}

std::string ScoreTable::render() const {
    std::string out = "model";
    for (const auto& f : features) out += "\t" + f;
    out += "\n";
    for (std::size_t r = 0; r < models.size(); ++r) {
        out += models[r];
        for (std::size_t c = 0; c < features.size(); ++c) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "\t%.2f", cells[r][c]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

ScoreTable build_score_table(
    const std::vector<MetaFeatureVector>& per_window_features,
    const std::vector<std::pair<std::string, std::vector<double>>>& per_window_scores) {
    const std::size_t n = per_window_features.size();
    if (n < 3) throw TooShort("build_score_table requires >= 3 windows");

    ScoreTable table;
    table.features.assign(kMetaFeatureNames.begin(), kMetaFeatureNames.end());

    std::array<std::vector<double>, 4> columns;
    for (auto& c : columns) c.reserve(n);
    for (const auto& fv : per_window_features) {
        auto arr = fv.as_array();
        for (std::size_t f = 0; f < 4; ++f) columns[f].push_back(arr[f]);
    }

    for (const auto& [model, scores] : per_window_scores) {
        if (scores.size() != n)
            throw LengthMismatch("build_score_table: score list for " + model +
                                 " does not match the feature list");
        table.models.push_back(model);
        std::vector<double> row(4);
        for (std::size_t f = 0; f < 4; ++f) row[f] = spearman_rho(columns[f], scores);
        table.cells.push_back(std::move(row));
    }
    return table;
}

} // namespace fwstack

#pragma once

#include <span>
#include <string>
#include <vector>

#include "fwstack/metafeatures.hpp"

namespace fwstack {

/// Symmetric MAPE, (1/n) sum 2|F-A| / (|A|+|F|), with 0/0 terms counted as 0.
/// Bounded in [0, 2].
double smape(std::span<const double> forecast, std::span<const double> actual);

/// Mean absolute error.
double mae(std::span<const double> forecast, std::span<const double> actual);

/// Pearson correlation of average (tie-fractional) rank vectors. Returns 0
/// when either argument is constant.
double spearman_rho(std::span<const double> x, std::span<const double> y);

/// Signed Spearman rho between every (model, feature) pair: rows are base
/// models, columns the four meta-features, both in their fixed order.
struct ScoreTable {
    std::vector<std::string> models;            // row labels
    std::vector<std::string> features;          // column labels
    std::vector<std::vector<double>> cells;     // cells[row][col]

    double cell(std::size_t model, MetaFeature f) const {
        return cells[model][static_cast<std::size_t>(f)];
    }
    /// Mean of |rho| down one feature column.
    double column_mean_abs(MetaFeature f) const;
    /// Mean signed rho down one feature column.
    double column_mean(MetaFeature f) const;
    /// Tab-separated rendering with 2-decimal cells (report layout).
    std::string render() const;
};

ScoreTable build_score_table(
    const std::vector<MetaFeatureVector>& per_window_features,
    const std::vector<std::pair<std::string, std::vector<double>>>& per_window_scores);

} // namespace fwstack

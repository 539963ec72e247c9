#include "fwstack/metafeatures.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "fwstack/errors.hpp"

namespace fwstack {

const char* to_string(MetaFeature f) { return kMetaFeatureNames[static_cast<std::size_t>(f)]; }

double MetaFeatureVector::get(MetaFeature f) const {
    switch (f) {
        case MetaFeature::CV: return cv;
        case MetaFeature::SVDE: return svd_entropy;
        case MetaFeature::KPSS: return kpss;
        case MetaFeature::ACF: return acf1;
    }
    return 0.0;
}

double coefficient_of_variation(const TimeSeries& window) {
    const std::size_t n = window.size();
    if (n < 2) throw TooShort("coefficient_of_variation requires length >= 2");
    double mean = 0.0;
    for (double v : window.values()) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : window.values()) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) return 0.0;
    if (mean == 0.0) throw ZeroMean("coefficient_of_variation undefined at zero mean");
    return sd / mean;
}

double svd_entropy(const TimeSeries& window, int order, int delay) {
    if (order < 1 || delay < 1) throw InvalidSpec("svd_entropy order and delay must be >= 1");
    const std::size_t n = window.size();
    const std::size_t span = static_cast<std::size_t>(order) * static_cast<std::size_t>(delay);
    if (n < span + 1)
        throw TooShortForEmbedding("svd_entropy requires length >= order*delay + 1");

    // Rows are length-`order` lagged subvectors with lag `delay`.
    const std::size_t rows = n - (static_cast<std::size_t>(order) - 1) * static_cast<std::size_t>(delay);
    Eigen::MatrixXd traj(static_cast<Eigen::Index>(rows), order);
    for (std::size_t i = 0; i < rows; ++i)
        for (int j = 0; j < order; ++j)
            traj(static_cast<Eigen::Index>(i), j) = window[i + static_cast<std::size_t>(j) * static_cast<std::size_t>(delay)];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(traj);
    Eigen::VectorXd sv = svd.singularValues();
    double total = sv.sum();
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        double lambda = sv[k] / total;
        if (lambda > 0.0) h -= lambda * std::log(lambda);
    }
    return h;
}

double kpss_statistic(const TimeSeries& window) {
    const std::size_t n = window.size();
    if (n < 3) throw DegenerateRegression("kpss_statistic requires T >= 3");
    if (n < 10) throw TooShort("kpss_statistic requires length >= 10");
    const double T = static_cast<double>(n);

    // OLS residuals of x_t on (1, t).
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n; ++t) {
        X(static_cast<Eigen::Index>(t), 0) = 1.0;
        X(static_cast<Eigen::Index>(t), 1) = static_cast<double>(t + 1);
        y[static_cast<Eigen::Index>(t)] = window[t];
    }
    Eigen::Vector2d beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    Eigen::VectorXd e = y - X * beta;

    double sum_sq = e.squaredNorm();
    if (sum_sq <= 1e-20 * (1.0 + y.squaredNorm())) return 0.0; // perfect trend fit

    // Partial sums.
    double s = 0.0, num = 0.0;
    for (Eigen::Index t = 0; t < e.size(); ++t) {
        s += e[t];
        num += s * s;
    }

    // Newey-West long-run variance with a Bartlett kernel.
    int bandwidth = static_cast<int>(std::floor(4.0 * std::pow(T / 100.0, 0.25)));
    double lrv = sum_sq;
    for (int l = 1; l <= bandwidth; ++l) {
        double w = 1.0 - static_cast<double>(l) / (bandwidth + 1.0);
        double gamma = 0.0;
        for (std::size_t t = static_cast<std::size_t>(l); t < n; ++t)
            gamma += e[static_cast<Eigen::Index>(t)] * e[static_cast<Eigen::Index>(t) - l];
        lrv += 2.0 * w * gamma;
    }
    lrv /= T;
    if (lrv <= 0.0) return 0.0;

    return num / (T * T) / lrv;
}

double acf(const TimeSeries& window, int lag) {
    const std::size_t n = window.size();
    if (lag < 0 || static_cast<std::size_t>(lag) >= n)
        throw InvalidSpec("acf lag must satisfy 0 <= lag < length");
    double mean = 0.0;
    for (double v : window.values()) mean += v;
    mean /= static_cast<double>(n);
    double denom = 0.0;
    for (double v : window.values()) denom += (v - mean) * (v - mean);
    if (denom == 0.0) return 0.0; // constant series convention
    double num = 0.0;
    for (std::size_t i = 0; i + static_cast<std::size_t>(lag) < n; ++i)
        num += (window[i] - mean) * (window[i + static_cast<std::size_t>(lag)] - mean);
    return num / denom;
}

MetaFeatureVector extract(const TimeSeries& window, const FeatureOptions& opts) {
    MetaFeatureVector out;
    out.cv = coefficient_of_variation(window);
    out.svd_entropy = svd_entropy(window, opts.svd_order, opts.svd_delay);
    out.kpss = kpss_statistic(window);
    out.acf1 = acf(window, opts.acf_lag);
    return out;
}

} // namespace fwstack

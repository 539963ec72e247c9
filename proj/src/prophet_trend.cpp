#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "fwstack/errors.hpp"
#include "fwstack/forecasters.hpp"

namespace fwstack {

TrendModel::TrendModel(double k, double m, std::vector<double> changepoints, std::vector<double> delta,
                       int train_len)
    : k_(k), m_(m), changepoints_(std::move(changepoints)), delta_(std::move(delta)),
      train_len_(train_len) {
    if (changepoints_.size() != delta_.size())
        throw InvalidSpec("TrendModel changepoints and delta must align");
    for (std::size_t j = 1; j < changepoints_.size(); ++j)
        if (changepoints_[j] <= changepoints_[j - 1])
            throw InvalidSpec("TrendModel changepoints must be strictly increasing");
    gamma_.resize(delta_.size());
    for (std::size_t j = 0; j < delta_.size(); ++j) gamma_[j] = -changepoints_[j] * delta_[j];
}

double TrendModel::evaluate(double t) const {
    double rate = k_, off = m_;
    for (std::size_t j = 0; j < changepoints_.size(); ++j) {
        if (t >= changepoints_[j]) {
            rate += delta_[j];
            off += gamma_[j];
        }
    }
    return rate * t + off;
}

std::vector<double> TrendModel::predict(int horizon) const {
    if (horizon < 1) throw InvalidSpec("predict horizon must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(horizon));
    for (int h = 0; h < horizon; ++h)
        out[static_cast<std::size_t>(h)] = evaluate(static_cast<double>(train_len_ + h));
    return out;
}

std::string TrendModel::summary() const {
    double max_delta = 0.0;
    for (double d : delta_) max_delta = std::max(max_delta, std::abs(d));
    char buf[128];
    std::snprintf(buf, sizeof(buf), "Trend(k=%.4f, m=%.4f, changepoints=%zu, max|delta|=%.4f)", k_, m_,
                  changepoints_.size(), max_delta);
    return buf;
}

TrendModel fit_prophet_trend(const TimeSeries& train, int n_changepoints) {
    const int n = static_cast<int>(train.size());
    if (n_changepoints < 0) throw InvalidSpec("n_changepoints must be >= 0");
    if (n <= n_changepoints + 2)
        throw TooShort("fit_prophet_trend requires length > n_changepoints + 2");

    // Uniform quantiles of the first 80% of the training span (day indexes).
    std::vector<double> cps;
    if (n_changepoints > 0) {
        int hist = static_cast<int>(std::floor(0.8 * n));
        for (int j = 1; j <= n_changepoints; ++j) {
            double pos = std::round(static_cast<double>(j) * (hist - 1) / n_changepoints);
            if (cps.empty() || pos > cps.back()) cps.push_back(pos);
        }
    }
    const std::size_t J = cps.size();

    // Columns: [t, 1, (t - s_1)_+, ..., (t - s_J)_+]; ridge 0.5 on the delta block.
    Eigen::MatrixXd X(n, 2 + static_cast<Eigen::Index>(J));
    Eigen::VectorXd y(n);
    for (int t = 0; t < n; ++t) {
        X(t, 0) = static_cast<double>(t);
        X(t, 1) = 1.0;
        for (std::size_t j = 0; j < J; ++j)
            X(t, 2 + static_cast<Eigen::Index>(j)) = std::max(0.0, static_cast<double>(t) - cps[j]);
        y[t] = train[static_cast<std::size_t>(t)];
    }
    Eigen::MatrixXd reg = Eigen::MatrixXd::Zero(X.cols(), X.cols());
    for (Eigen::Index j = 2; j < X.cols(); ++j) reg(j, j) = 0.5;
    Eigen::VectorXd beta = (X.transpose() * X + reg).ldlt().solve(X.transpose() * y);

    std::vector<double> delta(J);
    for (std::size_t j = 0; j < J; ++j) delta[j] = beta[2 + static_cast<Eigen::Index>(j)];
    return TrendModel(beta[0], beta[1], cps, delta, n);
}

} // namespace fwstack

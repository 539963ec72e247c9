#include <Eigen/Eigenvalues>
#include <complex>
#include <optional>
#include <set>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "fwstack/detail/optim.hpp"
#include "fwstack/errors.hpp"
#include "fwstack/forecasters.hpp"

namespace fwstack {

namespace {

std::vector<double> difference(std::vector<double> y, int d) {
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = 0; i + 1 < y.size(); ++i) y[i] = y[i + 1] - y[i];
        y.pop_back();
    }
    return y;
}

// Largest root modulus of lambda^n - c_1 lambda^(n-1) - ... - c_n via the
// companion matrix.
double max_root_modulus(const std::vector<double>& coeffs) {
    const int n = static_cast<int>(coeffs.size());
    if (n == 0) return 0.0;
    if (n == 1) return std::abs(coeffs[0]);
    if (n == 2) {
        // lambda^2 - c1 lambda - c2
        double c1 = coeffs[0], c2 = coeffs[1];
        double disc = c1 * c1 + 4.0 * c2;
        if (disc >= 0.0) {
            double r = std::sqrt(disc);
            return std::max(std::abs((c1 + r) / 2.0), std::abs((c1 - r) / 2.0));
        }
        return std::sqrt(c1 * c1 / 4.0 - disc / 4.0);
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) companion(0, i) = coeffs[static_cast<std::size_t>(i)];
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
        worst = std::max(worst, std::abs(solver.eigenvalues()[i]));
    return worst;
}

// near-unit roots are rejected, as in the usual auto-selection practice
constexpr double kRootMargin = 0.98;

bool causal(const std::vector<double>& ar) { return max_root_modulus(ar) < kRootMargin; }

bool invertible(const std::vector<double>& ma) {
    std::vector<double> neg(ma.size());
    for (std::size_t i = 0; i < ma.size(); ++i) neg[i] = -ma[i];
    return max_root_modulus(neg) < kRootMargin;
}

std::vector<std::complex<double>> poly_roots(const std::vector<double>& coeffs) {
    const int n = static_cast<int>(coeffs.size());
    std::vector<std::complex<double>> roots;
    if (n == 0) return roots;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) companion(0, i) = coeffs[static_cast<std::size_t>(i)];
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) roots.push_back(solver.eigenvalues()[i]);
    return roots;
}

// An AR root canceling an MA root leaves an unidentifiable candidate whose
// spare parameters only interpolate noise.
bool has_common_root(const std::vector<double>& ar, const std::vector<double>& ma) {
    if (ar.empty() || ma.empty()) return false;
    std::vector<double> neg(ma.size());
    for (std::size_t i = 0; i < ma.size(); ++i) neg[i] = -ma[i];
    auto ar_roots = poly_roots(ar);
    auto ma_roots = poly_roots(neg);
    for (const auto& a : ar_roots)
        for (const auto& b : ma_roots)
            if (std::abs(a - b) < 0.10) return true;
    return false;
}

// One-step residuals on the d-times differenced series coincide with
// one-step residuals of the original series, so candidates with different d
// compare fairly on AIC as long as the scoring window is anchored in
// original-series time.
std::size_t common_conditioning_point(std::size_t n) {
    return std::min<std::size_t>(ArimaOrder::kMaxP + ArimaOrder::kMaxD, n - 2);
}

// Conditional sum of squares with zero pre-sample residuals: the recursion
// starts at t = p, but the SSE sums only t >= score_from so candidates with
// different orders compete on one common window.
double css(const std::vector<double>& x, const std::vector<double>& ar, const std::vector<double>& ma,
           std::size_t score_from = 0, std::vector<double>* out_residuals = nullptr) {
    const std::size_t p = ar.size(), q = ma.size(), m = x.size();
    std::vector<double> e(m, 0.0);
    double sse = 0.0;
    score_from = std::max(score_from, p);
    for (std::size_t t = p; t < m; ++t) {
        double pred = 0.0;
        for (std::size_t i = 0; i < p; ++i) pred += ar[i] * x[t - 1 - i];
        for (std::size_t j = 0; j < q; ++j)
            if (t >= j + 1) pred += ma[j] * e[t - 1 - j];
        e[t] = x[t] - pred;
        if (t >= score_from) sse += e[t] * e[t];
    }
    if (out_residuals) *out_residuals = std::move(e);
    return sse;
}

// Hannan-Rissanen initial values: a long-AR fit supplies residual proxies,
// then one OLS on lagged values and lagged proxies.
void hannan_rissanen(const std::vector<double>& x, int p, int q, std::vector<double>& ar,
                     std::vector<double>& ma) {
    ar.assign(static_cast<std::size_t>(p), 0.0);
    ma.assign(static_cast<std::size_t>(q), 0.0);
    if (p + q == 0) return;
    const int m = static_cast<int>(x.size());

    std::vector<double> proxies(x.size(), 0.0);
    if (q > 0) {
        int h = std::min(std::max(p + q, 2) + 2, m / 3);
        if (h >= 1 && m - h > h + 1) {
            Eigen::MatrixXd X(m - h, h);
            Eigen::VectorXd y(m - h);
            for (int t = h; t < m; ++t) {
                y[t - h] = x[static_cast<std::size_t>(t)];
                for (int i = 0; i < h; ++i) X(t - h, i) = x[static_cast<std::size_t>(t - 1 - i)];
            }
            Eigen::VectorXd phi = (X.transpose() * X +
                                   1e-8 * Eigen::MatrixXd::Identity(h, h))
                                      .ldlt()
                                      .solve(X.transpose() * y);
            for (int t = h; t < m; ++t) {
                double pred = 0.0;
                for (int i = 0; i < h; ++i) pred += phi[i] * x[static_cast<std::size_t>(t - 1 - i)];
                proxies[static_cast<std::size_t>(t)] = x[static_cast<std::size_t>(t)] - pred;
            }
        }
    }

    const int lag = std::max(p, q);
    if (m - lag <= p + q + 1) return; // keep zero init on tiny samples
    Eigen::MatrixXd X(m - lag, p + q);
    Eigen::VectorXd y(m - lag);
    for (int t = lag; t < m; ++t) {
        y[t - lag] = x[static_cast<std::size_t>(t)];
        for (int i = 0; i < p; ++i) X(t - lag, i) = x[static_cast<std::size_t>(t - 1 - i)];
        for (int j = 0; j < q; ++j) X(t - lag, p + j) = proxies[static_cast<std::size_t>(t - 1 - j)];
    }
    Eigen::VectorXd beta = (X.transpose() * X +
                            1e-8 * Eigen::MatrixXd::Identity(p + q, p + q))
                               .ldlt()
                               .solve(X.transpose() * y);
    for (int i = 0; i < p; ++i) ar[static_cast<std::size_t>(i)] = beta[i];
    for (int j = 0; j < q; ++j) ma[static_cast<std::size_t>(j)] = beta[p + j];
}

struct Candidate {
    ArimaOrder order;
    double mean = 0.0;
    std::vector<double> ar, ma;
    double aic = std::numeric_limits<double>::infinity();
};

constexpr double kSseFloor = 1e-20;

double aic_of(int p, int d, int q, std::size_t n_resid, double sse) {
    int k = p + q + (d == 0 ? 1 : 0) + 1;
    double n = static_cast<double>(n_resid);
    return 2.0 * k + n * std::log(std::max(sse, kSseFloor) / n);
}

} // namespace

ArimaModel::ArimaModel(ArimaOrder order, double mean, std::vector<double> ar, std::vector<double> ma,
                       const TimeSeries& train)
    : order_(order), mean_(mean), ar_(std::move(ar)), ma_(std::move(ma)), train_(train.values()) {
    std::vector<double> w = difference(train_, order_.d);
    for (double& v : w) v -= mean_;
    const std::size_t t0 = common_conditioning_point(train_.size());
    const std::size_t score_from = t0 >= static_cast<std::size_t>(order_.d)
                                       ? t0 - static_cast<std::size_t>(order_.d)
                                       : 0;
    sse_ = css(w, ar_, ma_, score_from, &residuals_);
    aic_ = aic_of(order_.p, order_.d, order_.q, train_.size() - t0, sse_);
}

std::vector<double> ArimaModel::predict(int horizon) const {
    if (horizon < 1) throw InvalidSpec("predict horizon must be >= 1");
    const std::size_t p = ar_.size(), q = ma_.size();

    std::vector<double> w = difference(train_, order_.d);
    std::vector<double> x(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) x[i] = w[i] - mean_;

    // Mean-adjusted forecasts on the differenced scale; future shocks are 0.
    std::vector<double> ext = x;
    for (int hstep = 0; hstep < horizon; ++hstep) {
        std::size_t t = ext.size();
        double pred = 0.0;
        for (std::size_t i = 0; i < p; ++i) pred += ar_[i] * ext[t - 1 - i];
        for (std::size_t j = 0; j < q; ++j) {
            // residuals exist only for observed steps
            if (t >= j + 1 && t - 1 - j < residuals_.size()) pred += ma_[j] * residuals_[t - 1 - j];
        }
        ext.push_back(pred);
    }

    // Undo the mean adjustment and the d differencing passes.
    std::vector<std::vector<double>> levels(static_cast<std::size_t>(order_.d) + 1);
    levels[0] = train_;
    for (int k = 1; k <= order_.d; ++k) levels[static_cast<std::size_t>(k)] = difference(train_, k);

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(horizon));
    std::vector<double> last(static_cast<std::size_t>(order_.d) + 1);
    for (int k = 0; k <= order_.d; ++k) last[static_cast<std::size_t>(k)] = levels[static_cast<std::size_t>(k)].back();
    for (int hstep = 0; hstep < horizon; ++hstep) {
        double v = ext[x.size() + static_cast<std::size_t>(hstep)] + mean_;
        for (int k = order_.d - 1; k >= 0; --k) {
            v = last[static_cast<std::size_t>(k)] + v;
            last[static_cast<std::size_t>(k)] = v;
        }
        out.push_back(v);
    }
    return out;
}

std::string ArimaModel::summary() const {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "ARIMA(%d,%d,%d) aic=%.3f sse=%.6g", order_.p, order_.d, order_.q,
                  aic_, sse_);
    return buf;
}

ArimaModel fit_arima(const TimeSeries& train) {
    if (train.size() < 20) throw TooShort("fit_arima requires at least 20 observations");
    const std::vector<double>& y = train.values();

    // Grid over d with a stepwise AIC search over (p,q) at each d (the
    // reference auto-search library's default (p,q) procedure); all
    // candidates score one-step residuals over a common original-time
    // window, so the AICs compare across every (p,d,q).
    const std::size_t t0 = common_conditioning_point(y.size());
    const std::size_t n_scored = y.size() - t0;

    Candidate best;
    bool found = false;

    for (int d = 0; d <= ArimaOrder::kMaxD; ++d) {
        std::vector<double> w = difference(y, d);
        double mean = 0.0;
        if (d == 0) mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
        std::vector<double> x(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) x[i] = w[i] - mean;
        const std::size_t score_from = t0 - static_cast<std::size_t>(d);

        auto evaluate = [&](int p, int q) -> std::optional<Candidate> {
            if (static_cast<int>(n_scored) < std::max(8, 2 * (p + q))) return std::nullopt;

            std::vector<double> ar, ma;
            hannan_rissanen(x, p, q, ar, ma);
            if (!causal(ar) || !invertible(ma)) {
                std::fill(ar.begin(), ar.end(), 0.0);
                std::fill(ma.begin(), ma.end(), 0.0);
            }

            if (p + q > 0) {
                std::vector<double> start(ar);
                start.insert(start.end(), ma.begin(), ma.end());
                auto objective = [&](const std::vector<double>& params) {
                    std::vector<double> a(params.begin(), params.begin() + p);
                    std::vector<double> b(params.begin() + p, params.end());
                    if (!causal(a) || !invertible(b)) return 1e100;
                    return css(x, a, b, score_from);
                };
                // local polish around the HR start; a wide simplex walk
                // reaches noise-interpolation minima on overparameterized
                // candidates
                auto sol = detail::nelder_mead(objective, start, 0.05, 1e-9, 150);
                if (sol.value >= 1e100) return std::nullopt;
                ar.assign(sol.x.begin(), sol.x.begin() + p);
                ma.assign(sol.x.begin() + p, sol.x.end());
                if (!causal(ar) || !invertible(ma)) return std::nullopt;
                if (has_common_root(ar, ma)) return std::nullopt;
            }

            double sse = css(x, ar, ma, score_from);
            double aic = aic_of(p, d, q, n_scored, sse);
            if (!std::isfinite(aic)) return std::nullopt;
            return Candidate{{p, d, q}, mean, ar, ma, aic};
        };

        std::set<std::pair<int, int>> tried;
        Candidate d_best;
        bool d_found = false;
        auto consider = [&](int p, int q) -> bool {
            if (p < 0 || q < 0 || p > ArimaOrder::kMaxP || q > ArimaOrder::kMaxQ) return false;
            if (!tried.insert({p, q}).second) return false;
            auto cand = evaluate(p, q);
            if (cand && (!d_found || cand->aic < d_best.aic)) {
                d_best = *cand;
                d_found = true;
                return true;
            }
            return false;
        };

        for (auto [p, q] : {std::pair{2, 2}, {0, 0}, {1, 0}, {0, 1}}) consider(p, q);
        bool improved = d_found;
        while (improved) {
            improved = false;
            const int p = d_best.order.p, q = d_best.order.q;
            for (auto [np, nq] : {std::pair{p + 1, q}, {p - 1, q}, {p, q + 1}, {p, q - 1},
                                  {p + 1, q + 1}, {p - 1, q - 1}})
                if (consider(np, nq)) improved = true;
        }

        if (d_found && (!found || d_best.aic < best.aic)) {
            best = d_best;
            found = true;
        }
    }

    if (!found) return ArimaModel({0, 1, 0}, 0.0, {}, {}, train); // random-walk fallback
    return ArimaModel(best.order, best.mean, best.ar, best.ma, train);
}

} // namespace fwstack

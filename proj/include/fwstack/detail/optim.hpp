#pragma once

#include <algorithm>
#include <functional>
#include <vector>

namespace fwstack::detail {

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

/// Derivative-free Nelder-Mead simplex minimization. Deterministic given the
/// starting point; standard reflection/expansion/contraction coefficients.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> start, double step = 0.1,
                                 double tol = 1e-8, int max_iter = 500) {
    const std::size_t n = start.size();
    SimplexResult result;
    if (n == 0) {
        result.x = start;
        result.value = f(start);
        result.evaluations = 1;
        return result;
    }

    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += (start[i] != 0.0 ? step * std::abs(start[i]) : step);

    std::vector<double> values(n + 1);
    int evals = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        values[i] = f(simplex[i]);
        ++evals;
    }

    std::vector<std::size_t> order(n + 1);
    for (int iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

        if (values[order[n]] - values[order[0]] <= tol * (std::abs(values[order[0]]) + tol)) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[order[i]][d] / static_cast<double>(n);

        auto point = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d)
                p[d] = centroid[d] + coef * (simplex[order[n]][d] - centroid[d]);
            return p;
        };

        std::vector<double> reflected = point(-1.0);
        double fr = f(reflected);
        ++evals;
        if (fr < values[order[0]]) {
            std::vector<double> expanded = point(-2.0);
            double fe = f(expanded);
            ++evals;
            if (fe < fr) {
                simplex[order[n]] = expanded;
                values[order[n]] = fe;
            } else {
                simplex[order[n]] = reflected;
                values[order[n]] = fr;
            }
        } else if (fr < values[order[n - 1]]) {
            simplex[order[n]] = reflected;
            values[order[n]] = fr;
        } else {
            std::vector<double> contracted = point(0.5);
            double fc = f(contracted);
            ++evals;
            if (fc < values[order[n]]) {
                simplex[order[n]] = contracted;
                values[order[n]] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t d = 0; d < n; ++d)
                        simplex[order[i]][d] = simplex[order[0]][d] +
                                               0.5 * (simplex[order[i]][d] - simplex[order[0]][d]);
                    values[order[i]] = f(simplex[order[i]]);
                    ++evals;
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (values[i] < values[best]) best = i;
    result.x = simplex[best];
    result.value = values[best];
    result.evaluations = evals;
    return result;
}

} // namespace fwstack::detail

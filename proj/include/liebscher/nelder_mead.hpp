#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace liebscher {

struct NelderMeadResult {
    std::vector<double> x;
    double fmin = 0.0;
    std::size_t evals = 0;
    bool converged = false;
};

// Downhill simplex minimizer with the standard reflection/expansion/
// contraction/shrink moves. Converged when the spread max f - min f over the
// simplex falls below ftol.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, double initial_step,
                                    double ftol, std::size_t max_evals) {
    const std::size_t n = x0.size();
    NelderMeadResult result;
    std::vector<std::vector<double>> x(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) x[i + 1][i] += initial_step;
    std::vector<double> fx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        fx[i] = f(x[i]);
        ++result.evals;
    }

    const double alpha = 1.0, gamma = 2.0, beta = 0.5, sigma = 0.5;
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    while (result.evals < max_evals) {
        // order: best first, worst last
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        {
            std::vector<std::vector<double>> x2(n + 1);
            std::vector<double> f2(n + 1);
            for (std::size_t i = 0; i <= n; ++i) {
                x2[i] = x[idx[i]];
                f2[i] = fx[idx[i]];
            }
            x.swap(x2);
            fx.swap(f2);
        }
        if (fx[n] - fx[0] <= ftol) {
            result.converged = true;
            break;
        }
        for (std::size_t j = 0; j < n; ++j) {
            centroid[j] = 0.0;
            for (std::size_t i = 0; i < n; ++i) centroid[j] += x[i][j];
            centroid[j] /= static_cast<double>(n);
        }
        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - x[n][j]);
        const double fr = f(xr);
        ++result.evals;
        if (fr < fx[0]) {
            for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
            const double fe = f(xe);
            ++result.evals;
            if (fe < fr) {
                x[n] = xe;
                fx[n] = fe;
            } else {
                x[n] = xr;
                fx[n] = fr;
            }
        } else if (fr < fx[n - 1]) {
            x[n] = xr;
            fx[n] = fr;
        } else {
            const bool outside = fr < fx[n];
            const std::vector<double>& base = outside ? xr : x[n];
            for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + beta * (base[j] - centroid[j]);
            const double fc = f(xc);
            ++result.evals;
            if (fc < (outside ? fr : fx[n])) {
                x[n] = xc;
                fx[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        x[i][j] = x[0][j] + sigma * (x[i][j] - x[0][j]);
                    fx[i] = f(x[i]);
                    ++result.evals;
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fx[i] < fx[best]) best = i;
    result.x = x[best];
    result.fmin = fx[best];
    return result;
}

}  // namespace liebscher

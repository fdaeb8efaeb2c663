#pragma once

// Internal direct-search helpers: Nelder-Mead simplex and golden-section
// line search. Not part of the public headers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace ticklab::detail {

struct NmResult {
    std::vector<double> x;
    double fx = 0.0;
    std::size_t evals = 0;
    bool converged = false;
};

// Standard Nelder-Mead (reflect 1, expand 2, contract 0.5, shrink 0.5).
// Stops when the simplex diameter in parameter space drops below param_tol
// or the evaluation budget runs out.
inline NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                            std::vector<double> start,
                            std::vector<double> step,
                            double param_tol, std::size_t max_evals) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];

    NmResult res;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        fv[i] = f(pts[i]);
        ++res.evals;
    }

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> p2;
        std::vector<double> f2;
        for (std::size_t i : idx) {
            p2.push_back(pts[i]);
            f2.push_back(fv[i]);
        }
        pts.swap(p2);
        fv.swap(f2);
    };

    while (res.evals < max_evals) {
        order();
        double diam = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                diam = std::max(diam, std::fabs(pts[i][j] - pts[0][j]));
        if (diam < param_tol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / n;

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coef * (pts[n][j] - centroid[j]);
            return p;
        };

        auto xr = blend(-1.0);
        double fr = f(xr);
        ++res.evals;
        if (fr < fv[0]) {
            auto xe = blend(-2.0);
            double fe = f(xe);
            ++res.evals;
            if (fe < fr) { pts[n] = xe; fv[n] = fe; }
            else { pts[n] = xr; fv[n] = fr; }
        } else if (fr < fv[n - 1]) {
            pts[n] = xr;
            fv[n] = fr;
        } else {
            auto xc = blend(fr < fv[n] ? -0.5 : 0.5);
            double fc = f(xc);
            ++res.evals;
            if (fc < std::min(fr, fv[n])) {
                pts[n] = xc;
                fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
                    fv[i] = f(pts[i]);
                    ++res.evals;
                }
            }
        }
    }
    order();
    res.x = pts[0];
    res.fx = fv[0];
    return res;
}

// Golden-section minimization on [lo, hi]; assumes a unimodal stretch.
inline double golden_section(const std::function<double(double)>& f, double lo,
                             double hi, int iters = 200) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && b - a > 1e-14 * (1.0 + std::fabs(a)); ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

} // namespace ticklab::detail

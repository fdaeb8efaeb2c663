#pragma once

// Small shared test utilities: adaptive Simpson quadrature (reference
// integrator for the cumulative-volume checks) and a few conveniences.

#include <cmath>
#include <functional>

namespace testutil {

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

// Adaptive Simpson with absolute tolerance scaled by a crude magnitude probe.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double rel_tol = 1e-12) {
    double scale = 0.0;
    for (int i = 0; i <= 16; ++i) {
        const double x = a + (b - a) * i / 16.0;
        scale = std::max(scale, std::fabs(f(x)) * (b - a));
    }
    const double tol = std::max(scale, 1e-300) * rel_tol;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb),
                                tol, 60);
}

} // namespace testutil

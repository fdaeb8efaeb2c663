#pragma once

// Contract lifetime activity curve V(tau) = A (L-tau)^B tau^C e^(D tau) on
// 0 <= tau <= L: evaluation, analytic derivatives of any order, shape
// (peak, inflections), cumulative volume (closed form for integer C, series
// otherwise) and a Chebyshev-style max-abs fitter.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace ticklab::lifecurve {

struct CurveParams {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double D = 0.0;
    double L = 0.0;
};

// V(tau); domain [0, L], endpoints give exact zeros for B,C > 0.
double v_eval(const CurveParams& p, double tau);

// n-th derivative at interior tau (0 < tau < L). n = 0 returns V itself.
// Uses the logarithmic-derivative recursion, exact up to rounding.
double v_derivative(const CurveParams& p, double tau, unsigned n);

// First-derivative endpoint behavior, by case analysis rather than limits.
enum class EndpointKind { Zero, Finite, PlusInfinity, MinusInfinity };
struct EndpointDerivative {
    EndpointKind kind = EndpointKind::Zero;
    double value = 0.0; // meaningful for Zero/Finite
};
EndpointDerivative start_derivative(const CurveParams& p); // tau -> 0+
EndpointDerivative end_derivative(const CurveParams& p);   // tau -> L-

struct CurveShape {
    double tau_max = 0.0;
    double v_max = 0.0;
    double M = 0.0; // auxiliary radical term C + B - sqrt((DL-C-B)^2 + 4DCL)
    std::vector<double> inflections; // interior roots, ascending
};
// Peak via the closed form (exact D -> 0 limit C L / (C+B)); inflection
// points from the quartic sign-change scan plus bisection, each verified by
// a second-derivative sign change.
CurveShape shape(const CurveParams& p);

// Cumulative volume Vc(tau) = int_0^tau V. Closed form requires integer
// C in {1,2,3} and D > 0; otherwise throws std::invalid_argument (use
// vc_series). The series converges for any C > 0, D >= 0.
double vc_closed(const CurveParams& p, double tau);
double vc_series(const CurveParams& p, double tau, double tol = 1e-10);

// Max-abs (Chebyshev) fit of (tau, value) observations at fixed C and L.
// Differential mode compares V(tau_j) to values directly; cumulative mode
// compares running sums of V at integer tau (skipping listed non-trading
// days) to cumulative observations.
enum class FitMode { Differential, Cumulative };
struct FitOptions {
    std::size_t multistarts = 8;
    std::size_t max_evals = 2000;   // per start
    double param_tol = 1e-8;        // simplex size stop
    std::vector<int> skip_days;     // cumulative mode only
};
struct CurveFit {
    CurveParams params;
    double max_abs_residual = 0.0;
    bool converged = false;
    bool underdetermined = false; // fewer than 4 distinct tau values
    std::size_t evals = 0;
};
CurveFit fit_chebyshev(std::span<const std::pair<double, double>> obs,
                       FitMode mode, double C, double L,
                       const FitOptions& opts = {});

// Incomplete gamma/beta in the ranges vc_closed and vc_series exercise.
double upper_gamma(double s, double x);
double inc_beta(double x, double a, double b);

// Three-parameter "birth/peak/end" description mapped onto CurveParams with
// D = 0: peak at t_m with value c_m, support [t_b, t_e], sharpness delta.
CurveParams yin_map(double t_b, double t_m, double t_e, double c_m, double delta);

} // namespace ticklab::lifecurve

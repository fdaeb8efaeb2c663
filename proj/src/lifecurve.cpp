#include "ticklab/lifecurve.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "optimize.hpp"
#include "ticklab/specialfn.hpp"

namespace ticklab::lifecurve {

namespace {

void check_params(const CurveParams& p) {
    if (!(p.A > 0.0) || !(p.B > 0.0) || !(p.C > 0.0) || !(p.L > 0.0) ||
        !(p.D >= 0.0))
        throw std::invalid_argument(
            "curve params need A, B, C, L > 0 and D >= 0");
}

void check_tau(const CurveParams& p, double tau) {
    if (!(tau >= 0.0) || !(tau <= p.L))
        throw std::invalid_argument("tau outside [0, L]");
}

} // namespace

double v_eval(const CurveParams& p, double tau) {
    check_params(p);
    check_tau(p, tau);
    if (tau == 0.0 || tau == p.L) return 0.0;
    return p.A * std::pow(p.L - tau, p.B) * std::pow(tau, p.C) *
           std::exp(p.D * tau);
}

double v_derivative(const CurveParams& p, double tau, unsigned n) {
    check_params(p);
    if (n == 0) return v_eval(p, tau);
    if (!(tau > 0.0) || !(tau < p.L))
        throw std::invalid_argument(
            "interior derivatives need 0 < tau < L; use the endpoint helpers");

    // G^[k], k = 0..n-1, with G = D + C/tau - B/(L-tau):
    // G^[k] = k! (C (-1)^k tau^-(k+1) - B (L-tau)^-(k+1))
    std::vector<double> g(n);
    g[0] = p.D + p.C / tau - p.B / (p.L - tau);
    double fact = 1.0, tpow = tau * tau, lpow = (p.L - tau) * (p.L - tau);
    double sign = -1.0;
    for (unsigned k = 1; k < n; ++k) {
        fact *= k;
        g[k] = fact * (sign * p.C / tpow - p.B / lpow);
        tpow *= tau;
        lpow *= p.L - tau;
        sign = -sign;
    }

    // V^[m+1] = sum_i binom(m, i) G^[m-i] V^[i]
    std::vector<double> v(n + 1);
    v[0] = v_eval(p, tau);
    std::vector<double> binom{1.0};
    for (unsigned m = 0; m < n; ++m) {
        double acc = 0.0;
        for (unsigned i = 0; i <= m; ++i) acc += binom[i] * g[m - i] * v[i];
        v[m + 1] = acc;
        binom.push_back(1.0);
        for (unsigned i = m; i >= 1; --i) binom[i] += binom[i - 1];
    }
    return v[n];
}

EndpointDerivative start_derivative(const CurveParams& p) {
    check_params(p);
    if (p.C < 1.0) return {EndpointKind::PlusInfinity, 0.0};
    if (p.C == 1.0) return {EndpointKind::Finite, p.A * std::pow(p.L, p.B)};
    return {EndpointKind::Zero, 0.0};
}

EndpointDerivative end_derivative(const CurveParams& p) {
    check_params(p);
    if (p.B < 1.0) return {EndpointKind::MinusInfinity, 0.0};
    if (p.B == 1.0)
        return {EndpointKind::Finite,
                -p.A * std::pow(p.L, p.C) * std::exp(p.D * p.L)};
    return {EndpointKind::Zero, 0.0};
}

CurveShape shape(const CurveParams& p) {
    check_params(p);
    CurveShape s;
    const double dl = p.D * p.L;
    const double r = std::sqrt((dl - p.C - p.B) * (dl - p.C - p.B) +
                               4.0 * p.D * p.C * p.L);
    s.M = p.C + p.B - r;
    // conjugate form of (DL - C - B + R) / (2D): exact at D = 0 as well
    s.tau_max = 2.0 * p.C * p.L / (r + p.C + p.B - dl);
    // closed form A/(2D)^(B+C) (DL+M)^B (DL-M)^C e^((DL-M)/2) reduces to
    // V(tau_max) via DL-M = 2 D tau_max, DL+M = 2 D (L - tau_max)
    s.v_max = v_eval(p, s.tau_max);

    // inflection scan: sign changes of C(L-t)^2 + Bt^2 - (Dt(L-t)+C(L-t)-Bt)^2
    auto h = [&](double t) {
        const double u = p.L - t;
        const double w = p.D * t * u + p.C * u - p.B * t;
        return p.C * u * u + p.B * t * t - w * w;
    };
    const double eps = 1e-9 * p.L;
    const int grid = 4096;
    double prev_t = eps, prev_h = h(prev_t);
    for (int i = 1; i <= grid; ++i) {
        const double t = eps + (p.L - 2.0 * eps) * i / grid;
        const double ht = h(t);
        if ((prev_h < 0.0) != (ht < 0.0) && prev_h != 0.0) {
            double a = prev_t, b = t, fa = prev_h;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = h(mid);
                if ((fa < 0.0) == (fm < 0.0)) { a = mid; fa = fm; }
                else b = mid;
            }
            const double root = 0.5 * (a + b);
            // keep only genuine curvature flips
            const double lo = std::max(eps, root - 1e-6 * p.L);
            const double hi = std::min(p.L - eps, root + 1e-6 * p.L);
            const double d2lo = v_derivative(p, lo, 2);
            const double d2hi = v_derivative(p, hi, 2);
            if ((d2lo < 0.0) != (d2hi < 0.0)) s.inflections.push_back(root);
        }
        prev_t = t;
        prev_h = ht;
    }
    return s;
}

double upper_gamma(double s, double x) { return special::gamma_upper(s, x); }
double inc_beta(double x, double a, double b) { return special::inc_beta(x, a, b); }

double vc_closed(const CurveParams& p, double tau) {
    check_params(p);
    check_tau(p, tau);
    if (!(p.D > 0.0))
        throw std::invalid_argument("vc_closed needs D > 0; use vc_series");
    const double c = p.C;
    int ci = static_cast<int>(std::lround(c));
    if (std::fabs(c - ci) > 1e-12 || ci < 1 || ci > 3)
        throw std::invalid_argument("vc_closed supports C in {1,2,3}; use vc_series");
    if (tau == 0.0) return 0.0;

    const double dl = p.D * p.L;
    const double lo = p.D * (p.L - tau);
    double terms[8];
    int nt = 0;
    auto push = [&](double coef, double s) {
        terms[nt++] = coef * special::gamma_upper(s, lo);
        terms[nt++] = -coef * special::gamma_upper(s, dl);
    };
    if (ci == 1) {
        push(dl, p.B + 1.0);
        push(-1.0, p.B + 2.0);
    } else if (ci == 2) {
        push(dl * dl, p.B + 1.0);
        push(-2.0 * dl, p.B + 2.0);
        push(1.0, p.B + 3.0);
    } else {
        push(dl * dl * dl, p.B + 1.0);
        push(-3.0 * dl * dl, p.B + 2.0);
        push(3.0 * dl, p.B + 3.0);
        push(-1.0, p.B + 4.0);
    }
    double combo = 0.0, big = 0.0;
    for (int i = 0; i < nt; ++i) {
        combo += terms[i];
        big = std::max(big, std::fabs(terms[i]));
    }
    // the signed gamma terms agree in their leading orders of D tau, so for
    // small DL the sum cancels badly; measure the amplification and take the
    // positive-term series instead once it costs more than ~1e-11 relative
    if (big * 2e-15 > 1e-11 * std::fabs(combo)) {
        const double first = p.A * std::pow(p.L, p.B + p.C + 1.0) *
                             special::inc_beta(tau / p.L, p.C + 1.0, p.B + 1.0);
        return vc_series(p, tau, 1e-13 * first);
    }
    return p.A * std::exp(dl) * std::pow(p.D, -p.B - 1.0 - c) * combo;
}

double vc_series(const CurveParams& p, double tau, double tol) {
    check_params(p);
    check_tau(p, tau);
    if (!(tol > 0.0)) throw std::invalid_argument("vc_series: tol must be > 0");
    if (tau == 0.0) return 0.0;

    const double x = tau / p.L;
    const double dl = p.D * p.L;
    const double scale = p.A * std::pow(p.L, p.B + p.C + 1.0);
    const double tail_scale = scale * std::exp(dl);
    double weight = 1.0; // (DL)^i / i!
    double total = 0.0;
    for (int i = 0; i < 1000; ++i) {
        total += weight * special::inc_beta(x, p.C + i + 1.0, p.B + 1.0);
        weight *= dl / (i + 1.0);
        // every remaining incomplete beta is below 1, so the geometric-free
        // exponential tail bound certifies the truncation error
        if (tail_scale * weight <= tol || dl == 0.0) break;
    }
    return scale * total;
}

namespace {

struct Objective {
    std::vector<std::pair<double, double>> obs;
    FitMode mode;
    double C, L;
    std::set<int> skip;

    double operator()(const std::vector<double>& theta) const {
        CurveParams p{std::exp(theta[0]), theta[1], C, std::exp(theta[2]), L};
        if (!(p.B > 0.0) || !std::isfinite(p.A) || !std::isfinite(p.D) ||
            p.B > 200.0 || p.D * p.L > 600.0)
            return 1e300;
        double worst = 0.0;
        if (mode == FitMode::Differential) {
            for (const auto& [t, y] : obs)
                worst = std::max(worst, std::fabs(v_eval(p, t) - y));
            return worst;
        }
        // cumulative: running sum of V at trading integers up to each tau
        const int top = static_cast<int>(std::floor(obs.back().first));
        std::vector<double> cum(top + 1, 0.0);
        for (int t = 1; t <= top; ++t)
            cum[t] = cum[t - 1] + (skip.count(t) ? 0.0 : v_eval(p, t));
        for (const auto& [t, y] : obs)
            worst = std::max(worst,
                             std::fabs(cum[static_cast<int>(std::floor(t))] - y));
        return worst;
    }
};

} // namespace

CurveFit fit_chebyshev(std::span<const std::pair<double, double>> obs,
                       FitMode mode, double C, double L,
                       const FitOptions& opts) {
    if (obs.size() < 4)
        throw std::invalid_argument("fit_chebyshev: need >= 4 observations");
    if (!(C > 0.0) || !(L > 0.0))
        throw std::invalid_argument("fit_chebyshev: need C > 0 and L > 0");
    Objective f;
    f.obs.assign(obs.begin(), obs.end());
    std::sort(f.obs.begin(), f.obs.end());
    for (const auto& [t, y] : f.obs)
        if (!(t > 0.0) || !(t < L))
            throw std::invalid_argument("fit_chebyshev: tau outside (0, L)");
    f.mode = mode;
    f.C = C;
    f.L = L;
    f.skip.insert(opts.skip_days.begin(), opts.skip_days.end());

    CurveFit out;
    std::set<double> distinct;
    for (const auto& [t, y] : f.obs) distinct.insert(t);
    if (distinct.size() < 4) out.underdetermined = true;

    // peak location/height guess; cumulative data is differenced first
    double peak_t = L / 2.0, peak_v = 0.0;
    if (mode == FitMode::Differential) {
        for (const auto& [t, y] : f.obs)
            if (y > peak_v) { peak_v = y; peak_t = t; }
    } else {
        for (std::size_t i = 1; i < f.obs.size(); ++i) {
            const double dt = f.obs[i].first - f.obs[i - 1].first;
            if (dt <= 0.0) continue;
            const double rate = (f.obs[i].second - f.obs[i - 1].second) / dt;
            if (rate > peak_v) {
                peak_v = rate;
                peak_t = 0.5 * (f.obs[i].first + f.obs[i - 1].first);
            }
        }
    }
    if (!(peak_v > 0.0)) peak_v = 1.0;

    const double b_starts[] = {0.5, 1.0, 2.0, 3.0};
    const double d_starts[] = {0.5 / L, 5.0 / L};
    std::vector<std::vector<double>> starts;
    for (double b0 : b_starts)
        for (double d0 : d_starts) {
            const double denom = std::pow(L - peak_t, b0) * std::pow(peak_t, C) *
                                 std::exp(d0 * peak_t);
            const double a0 = std::max(peak_v / denom, 1e-300);
            starts.push_back({std::log(a0), b0, std::log(d0)});
        }
    const std::size_t want = std::max<std::size_t>(1, opts.multistarts);
    while (starts.size() > want) starts.pop_back();

    double best = 1e301;
    bool converged = false;
    std::vector<double> best_x;
    for (const auto& s0 : starts) {
        auto r = detail::nelder_mead(std::cref(f), s0, {0.3, 0.3, 0.3},
                                     opts.param_tol, opts.max_evals);
        out.evals += r.evals;
        if (r.fx < best) {
            best = r.fx;
            best_x = r.x;
            converged = r.converged;
        }
    }
    // the max-abs objective tends to collapse the simplex early; restarting
    // with a fresh one at the incumbent recovers the lost progress
    for (int round = 0; round < 2; ++round) {
        auto r = detail::nelder_mead(std::cref(f), best_x, {0.05, 0.05, 0.05},
                                     opts.param_tol, opts.max_evals);
        out.evals += r.evals;
        if (!(r.fx < best)) break;
        best = r.fx;
        best_x = r.x;
        converged = r.converged;
    }
    out.params = {std::exp(best_x[0]), best_x[1], C, std::exp(best_x[2]), L};
    out.max_abs_residual = best;
    out.converged = converged && !out.underdetermined;
    return out;
}

CurveParams yin_map(double t_b, double t_m, double t_e, double c_m, double delta) {
    if (!(t_b < t_m) || !(t_m < t_e))
        throw std::invalid_argument("yin_map: need t_b < t_m < t_e");
    if (!(c_m > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("yin_map: need c_m > 0 and delta > 0");
    CurveParams p;
    p.L = t_e - t_b;
    p.B = delta;
    p.C = delta * (t_m - t_b) / (t_e - t_m);
    p.D = 0.0;
    p.A = c_m * std::pow((t_e - t_m) * std::pow(t_m - t_b,
                                                (t_m - t_b) / (t_e - t_m)),
                         -delta);
    return p;
}

} // namespace ticklab::lifecurve

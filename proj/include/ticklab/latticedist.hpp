#pragma once

// Discrete rank laws for lattice increments (Hurwitz zeta / Zipf-Mandelbrot),
// log-log least squares fitting, the Kumaraswamy waiting-time family and its
// two-step moment fit, and the Weibull skewness/kurtosis reference curve.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "ticklab/moments.hpp"

namespace ticklab::latticedist {

// Empirical rank table: distinct ranks with counts; frequencies on demand.
struct RankFrequency {
    std::vector<std::pair<long long, std::uint64_t>> counts; // ascending rank
    std::uint64_t total = 0;

    static RankFrequency from_counts(
        std::span<const std::pair<long long, std::uint64_t>> counts);
    static RankFrequency from_values(std::span<const long long> values);

    double frequency(long long rank) const;
    std::vector<std::pair<long long, double>> frequencies() const;
};

// Hurwitz zeta(S, Q) = sum_{i>=0} (i+Q)^{-S}, S > 1, Q > 0.
// Euler-Maclaurin with 1e4 direct terms; relative error ~1e-12.
double hurwitz_zeta(double S, double Q);

// Rank law over |k| = 0, 1, 2, ...: P(k) = (k+Q)^{-S} / zeta(S, Q).
double hz_pmf(long long k, double Q, double S);
// Truncated variant on ranks 1..N.
double zm_pmf(long long k, double Q, double S, long long N);

enum class InterceptMode {
    TiedNormalizer, // intercept constrained to -zeta(S, Q)
    Free            // classic two-parameter log-log line
};

struct ZetaLawFit {
    double S = 0.0;
    double Q = 0.0;
    double slope = 0.0;     // -S
    double intercept = 0.0; // -zeta(S,Q) when tied, LS intercept when free
    double objective = 0.0; // weighted sum of squared log residuals
    bool weighted = false;
    InterceptMode mode = InterceptMode::TiedNormalizer;
};

// Least squares on ln f_k vs ln(k+Q): minimize
//   sum_k w_k (ln f_k + S ln(k+Q) - c)^2
// over Q (outer golden section on a bracketing scan, ties toward smaller Q)
// and S (inner 1-d solve). Weighted mode uses w_k = f_k, otherwise w_k = 1.
// In TiedNormalizer mode c = -zeta(S, Q); in Free mode c is a free
// parameter. Ranks listed in `exclude` are left out of fit and objective.
// Requires >= 3 distinct included ranks.
ZetaLawFit fit_loglog(const RankFrequency& ranks, bool weighted,
                      const std::set<long long>& exclude = {},
                      InterceptMode mode = InterceptMode::TiedNormalizer);

// Kumaraswamy on [z_min, z_max] with an atom of mass F0 at z_min.
struct KumaParams {
    double a = 1.0;
    double b = 1.0;
    double z_min = 0.0;
    double z_max = 1.0;
    double F0 = 0.0;
};
double kuma_cdf(double z, const KumaParams& p);
double kuma_pdf(double z, const KumaParams& p); // continuous part only
// Inverse CDF for u in [0, 1); u < F0 maps to z_min.
double kuma_inverse_cdf(double u, const KumaParams& p);

struct DistMoments {
    double mean = 0.0;
    double stddev = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};
// Closed-form moments; only the z_min = 0, F0 = 0 case is supported.
DistMoments kuma_moments(const KumaParams& p);

// (skewness, excess kurtosis) of the Kumaraswamy with given (a, b)
// (scale-free, so z_max drops out).
std::pair<double, double> kuma_skew_kurt(double a, double b);

// Weibull reference: (skewness, excess kurtosis) per shape value.
std::vector<std::pair<double, double>> weibull_moment_curve(
    std::span<const double> shapes);
std::pair<double, double> weibull_skew_kurt(double shape);

// Two-step waiting-time fit. Step 1: pick the grid `a` whose (skew, kurt)
// curve over b in the matching interval comes closest (sum over sessions of
// squared euclidean distance) to the session (skewness, excess kurtosis)
// points. Step 2: per session, sweep b over the interval and set z_max by
// projecting (mean, stddev) onto the moment ray, keeping the best (b, z_max).
struct WaitingFitOptions {
    std::vector<double> a_grid = {0.05, 0.1, 0.15, 0.2};
    // b search interval per grid entry (same length as a_grid)
    std::vector<std::pair<double, double>> b_intervals = {
        {0.058, 0.435}, {0.3, 2.8}, {0.3, 3.8}, {0.34, 5.5}};
    std::size_t b_sweep = 400;
};
struct SessionWaitingFit {
    double b = 0.0;
    double z_max = 0.0;
    double distance2 = 0.0; // squared (mean, stddev) residual at chosen (b, z_max)
};
struct TwoStepWaitingFit {
    double a = 0.0;
    std::size_t a_index = 0;
    std::vector<double> step1_totals; // per grid entry
    std::vector<SessionWaitingFit> sessions;
};
// Needs at least 10 session summaries with all four moments defined; grid
// entries with an empty b-interval are skipped.
TwoStepWaitingFit fit_waiting_two_step(
    std::span<const moments::MomentSummary> sessions,
    const WaitingFitOptions& opts = {});

} // namespace ticklab::latticedist

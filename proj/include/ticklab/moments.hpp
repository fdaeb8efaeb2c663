#pragma once

// Sample moment summaries, exact lattice price/increment identities,
// Gaussian class probabilities with Pearson chi-square tests, value areas
// and ordinary least squares (free or forced-zero intercept).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ticklab::moments {

struct MomentSummary {
    std::uint64_t n = 0;
    double mean = 0.0; // a1
    double min = 0.0;
    double max = 0.0;
    std::uint64_t n_min = 0; // how many samples hit min / max
    std::uint64_t n_max = 0;
    // raw moments a_k = sum x^k / n and biased central moments m_k
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    // unbiased central moment estimates; absent when n is too small
    std::optional<double> mu2; // needs n >= 2
    std::optional<double> mu3; // needs n >= 3
    std::optional<double> mu4; // needs n >= 4
    std::optional<double> stddev;
    std::optional<double> skewness;        // mu3 / mu2^(3/2)
    std::optional<double> excess_kurtosis; // mu4 / mu2^2 - 3
};

// Moments of a plain sample. Input may be in any order; the result is
// order-independent (values are canonicalized before accumulation).
MomentSummary sample_moments(std::span<const double> values);
// Moments of a (value, count) histogram. Expanding the histogram and calling
// the plain overload gives bit-identical results.
MomentSummary sample_moments(std::span<const std::pair<double, std::uint64_t>> hist);

// Exact integer checks of the price/increment mean identities on a lattice
// walk. p1 is the first price index, b the N-1 price increments (indices).
struct IdentityReport {
    std::uint64_t n = 0;              // number of prices
    long long sum_prices = 0;         // sum of price indices
    long long sum_increments = 0;     // sum of b
    long long weighted_increments = 0; // sum over i=2..N of i*b_{i-1}
    // identity 1: N*a1(P) == N*P1 + (N+1)*sum(b) - weighted_increments
    long long id1_lhs = 0, id1_rhs = 0;
    // identity 2: weighted_increments == -P1 - N*a1(P) + (N+1)*PN
    long long id2_lhs = 0, id2_rhs = 0;
    bool exact = false;
    double a1_prices = 0.0;
    double a1_increments = 0.0;
};
IdentityReport price_mean_identities(long long p1, std::span<const long long> b);

// Gaussian CDF and interval probability.
double gaussian_cdf(double x, double mean, double sd);
double interval_prob(double lo, double hi, double mean, double sd);

// One histogram class: counts of samples in (lo, hi].
struct Bin {
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t count = 0;
};

struct Chi2Report {
    double chi2 = 0.0;
    std::size_t dof = 0;
    double critical = 0.0;
    double upper_tail_p = 0.0;
    bool reject = false;
    std::vector<double> terms; // per-class (n_j - N p_j)^2 / (N p_j)
};

// Pearson chi-square of binned counts against class probabilities p (same
// length). dof defaults to classes-1; pass dof_override to pin it.
Chi2Report pearson_chi2(std::span<const Bin> bins, std::span<const double> p,
                        double upper_tail_p = 0.005,
                        std::optional<std::size_t> dof_override = {});

// Log returns ln(m_i) - ln(m_{i-1}) of a positive lattice price walk, binned
// by the given class edges (edges.size() == classes + 1, strictly
// increasing). Gaussian class probabilities use the sample mean and stddev
// of the returns themselves.
struct LogReturnReport {
    std::vector<double> returns;
    MomentSummary summary;
    std::vector<Bin> bins;
    std::vector<double> p; // Gaussian class probabilities
    std::uint64_t outside = 0; // returns falling outside the edge range
    Chi2Report chi2;
};
LogReturnReport logreturn_classes(std::span<const long long> prices,
                                  std::span<const double> edges,
                                  double upper_tail_p = 0.005);

// Value area of a per-level volume histogram: walk in from each side until
// the cumulative share first reaches f; report those levels and the
// volume-weighted mean level.
struct ValueArea {
    long long left = 0;
    long long right = 0;
    double mean_level = 0.0;
    double fraction = 0.0;
};
ValueArea value_area(std::span<const std::pair<long long, std::uint64_t>> histogram,
                     double fraction = 0.15);

// Ordinary least squares y ~ slope*x (+ intercept). Confidence bounds are
// half-widths of two-sided t intervals at the given level. Forced-zero fits
// use dof = n-1 and the uncentered R = sqrt(1 - SSE / sum y^2); free fits
// use dof = n-2 and the signed Pearson correlation.
struct OlsFit {
    double slope = 0.0;
    double slope_half_width = 0.0;
    std::optional<double> intercept;
    std::optional<double> intercept_half_width;
    double r = 0.0;
    std::size_t n = 0;
    std::size_t dof = 0;
    double confidence = 0.0;
    double sse = 0.0;
};
OlsFit ols(std::span<const double> x, std::span<const double> y,
           bool force_zero_intercept, double confidence = 0.95);

} // namespace ticklab::moments

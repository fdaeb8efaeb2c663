#pragma once

// Dependence between waiting times (a) and price increments (b):
// contingency tables, the L1 / log-likelihood / chi-square independence
// statistics with their rejection thresholds, variance-vs-waiting slices and
// the double-log variance regression.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ticklab/moments.hpp"

namespace ticklab::depstats {

struct Contingency {
    std::vector<long long> a_values; // ascending distinct
    std::vector<long long> b_values;
    std::vector<std::uint64_t> a_counts;
    std::vector<std::uint64_t> b_counts;
    // observed joint cells only, (a index, b index) -> count, lexicographic
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::uint64_t>> joint;
    std::uint64_t n = 0;

    std::size_t m_a() const { return a_values.size(); }
    std::size_t m_b() const { return b_values.size(); }
    std::size_t m_ab() const { return joint.size(); }
};
Contingency build_contingency(std::span<const std::pair<long long, long long>> pairs);

struct DependenceReport {
    double L = 0.0;       // sum over full product alphabet of |v_ab - v_a v_b|
    double eps_L = 0.0;   // sqrt(2 ln 2) sqrt(m_a m_b / n)
    double I = 0.0;       // 2 sum v_ab ln(v_ab / (v_a v_b)), natural log
    double eps_I = 0.0;   // m_a m_b (2 ln(n + m_a m_b) + 1) / n
    double chi2 = 0.0;    // sum (v_ab - v_a v_b)^2 / (v_a v_b)
    double xi = 0.0;      // (n chi2 - m_a m_b) / sqrt(2 m_a m_b)
    bool reject_L = false;
    bool reject_I = false;
    std::uint64_t n = 0;
    std::size_t m_a = 0, m_b = 0, m_ab = 0;
    bool natural_log = true; // I uses ln, not log10
};
DependenceReport dependence_statistics(const Contingency& c);
DependenceReport dependence_statistics(
    std::span<const std::pair<long long, long long>> pairs);

struct VarianceSlices {
    struct Slice {
        long long a = 0;
        moments::MomentSummary b_moments;
    };
    // every distinct a whose group reaches min_size, ascending
    std::vector<Slice> slices;
    std::uint64_t excluded_pairs = 0;  // pairs in undersized groups
    std::size_t excluded_slices = 0;
    struct Interval {
        long long a_first = 0, a_last = 0; // slice range covered
        double a_center = 0.0;
        moments::MomentSummary variance_moments; // moments of slice variances
    };
    std::vector<Interval> intervals;
};
// Slices group b by exact a value; intervals aggregate `width` consecutive
// qualifying slices (a > 0 unless include_zero_in_intervals) and take sample
// moments of their unbiased variances.
VarianceSlices variance_slices(std::span<const std::pair<long long, long long>> pairs,
                               std::size_t width = 10, std::size_t min_size = 3,
                               bool include_zero_in_intervals = false);

struct DloglogFit {
    moments::OlsFit fit;
    std::size_t excluded_points = 0; // intervals with mean variance <= baseline
    double baseline = 0.0;
};
// Regression of ln ln(mu2(a)/mu2(0)) on ln(a) at interval centers, where
// mu2(a) is the interval mean variance and mu2(0) the caller's baseline.
// Fewer than 3 usable points is an error.
DloglogFit dloglog_fit(const VarianceSlices& slices, double baseline_mu2_0);

} // namespace ticklab::depstats

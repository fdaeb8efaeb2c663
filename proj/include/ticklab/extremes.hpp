#pragma once

// Per-session extreme price increments, their empirical PMF (two signed
// wings plus the zero rank), and the discretized type-II extreme-value law
// with an MLE fitter.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ticklab/latticedist.hpp"

namespace ticklab::extremes {

struct SessionExtremes {
    std::string session_id;
    long long max_b = 0;
    long long min_b = 0;
    std::uint64_t n_max = 0; // occurrences within the session
    std::uint64_t n_min = 0;
};

struct ExtremesReport {
    std::vector<SessionExtremes> sessions;
    std::size_t skipped_empty = 0;
    // signed-rank EPMFs: per wing and over the union multiset (maxima plus
    // minima), each normalized to 1
    std::vector<std::pair<long long, double>> epmf_max;
    std::vector<std::pair<long long, double>> epmf_min;
    std::vector<std::pair<long long, double>> epmf_union;
    // absolute-rank tables for rank-law fitting reuse
    latticedist::RankFrequency abs_max_ranks;
    latticedist::RankFrequency abs_min_ranks;
};
// Sessions are (id, b-increments); empty ones are skipped and counted.
ExtremesReport session_extremes(
    std::span<const std::pair<std::string, std::vector<long long>>> sessions);

struct Ftg2Params {
    double k = 1.0; // tail index, > 0
    double b = 1.0; // scale, > 0
    double a = 0.0; // shift, >= 0
};

// PMF(n) = k b (b n + a)^(-(k+1)) e^(-(b n + a)^(-k)) / Z for n >= 1,
// PMF(0) = 0.
double ftg2_pmf(long long n, const Ftg2Params& p);

struct Ftg2Normalizer {
    double z = 0.0;
    double bound = 0.0;    // certified truncation error
    std::uint64_t terms = 0; // direct terms summed
};
// Direct sum plus Euler-Maclaurin tail; bound <= tol guaranteed.
Ftg2Normalizer ftg2_normalizer(const Ftg2Params& p, double tol = 1e-10);

struct Ftg2Fit {
    Ftg2Params params;
    double log_likelihood = 0.0;
    double chi2 = 0.0; // against fitted PMF over observed ranks
    bool converged = false;
    std::uint64_t dropped_zero_ranks = 0; // PMF(0)=0, cannot enter the MLE
};
// MLE by Nelder-Mead over (log k, log b, a), 20 multistarts, tol 1e-8.
// Needs >= 5 distinct positive ranks.
Ftg2Fit fit_ftg2(const latticedist::RankFrequency& ranks);

} // namespace ticklab::extremes

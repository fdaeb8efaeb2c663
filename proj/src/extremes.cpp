#include "ticklab/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "optimize.hpp"

namespace ticklab::extremes {

ExtremesReport session_extremes(
    std::span<const std::pair<std::string, std::vector<long long>>> sessions) {
    ExtremesReport rep;
    std::vector<long long> maxima, minima;
    for (const auto& [id, b] : sessions) {
        if (b.empty()) {
            ++rep.skipped_empty;
            continue;
        }
        SessionExtremes se;
        se.session_id = id;
        se.max_b = *std::max_element(b.begin(), b.end());
        se.min_b = *std::min_element(b.begin(), b.end());
        se.n_max = std::count(b.begin(), b.end(), se.max_b);
        se.n_min = std::count(b.begin(), b.end(), se.min_b);
        rep.sessions.push_back(se);
        maxima.push_back(se.max_b);
        minima.push_back(se.min_b);
    }

    auto epmf = [](const std::vector<long long>& v) {
        std::map<long long, std::uint64_t> cnt;
        for (long long x : v) ++cnt[x];
        std::vector<std::pair<long long, double>> out;
        for (const auto& [rank, c] : cnt)
            out.emplace_back(rank, static_cast<double>(c) /
                                       static_cast<double>(v.size()));
        return out;
    };
    if (!maxima.empty()) {
        rep.epmf_max = epmf(maxima);
        rep.epmf_min = epmf(minima);
        std::vector<long long> both = maxima;
        both.insert(both.end(), minima.begin(), minima.end());
        rep.epmf_union = epmf(both);

        std::vector<long long> abs_max(maxima), abs_min(minima);
        for (auto& x : abs_max) x = std::llabs(x);
        for (auto& x : abs_min) x = std::llabs(x);
        rep.abs_max_ranks = latticedist::RankFrequency::from_values(abs_max);
        rep.abs_min_ranks = latticedist::RankFrequency::from_values(abs_min);
    }
    return rep;
}

namespace {

void check_ftg2(const Ftg2Params& p) {
    if (!(p.k > 0.0) || !(p.b > 0.0) || !(p.a >= 0.0))
        throw std::invalid_argument("ftg2: need k > 0, b > 0, a >= 0");
}

// density f(x) = d/dx exp(-(bx+a)^-k); the PMF numerator at integers
double ftg2_f(double x, const Ftg2Params& p) {
    const double base = p.b * x + p.a;
    const double u = std::pow(base, -p.k);
    return p.k * p.b * std::pow(base, -p.k - 1.0) * std::exp(-u);
}

double ftg2_fprime(double x, const Ftg2Params& p) {
    const double base = p.b * x + p.a;
    const double u = std::pow(base, -p.k);
    return p.k * p.b * p.b * std::exp(-u) * std::pow(base, -p.k - 2.0) *
           (-(p.k + 1.0) + p.k * u);
}

} // namespace

Ftg2Normalizer ftg2_normalizer(const Ftg2Params& p, double tol) {
    check_ftg2(p);
    if (!(tol > 0.0)) throw std::invalid_argument("ftg2_normalizer: tol <= 0");

    // Euler-Maclaurin around cutoff N: sum_{n>=N} f(n) equals the exact
    // integral 1 - exp(-(bN+a)^-k) plus f(N)/2 - f'(N)/12 + R, with |R|
    // bounded by a safety multiple of |f'(N)|/12 (f' decays monotonically
    // past the mode).
    std::uint64_t n0 = 1024;
    double bound;
    while (true) {
        bound = std::fabs(ftg2_fprime(static_cast<double>(n0), p)) / 6.0;
        if (bound <= tol || n0 >= (1ull << 24)) break;
        n0 *= 2;
    }

    Ftg2Normalizer z;
    z.terms = n0;
    z.bound = bound;
    double sum = 0.0;
    for (std::uint64_t n = 1; n < n0; ++n)
        sum += ftg2_f(static_cast<double>(n), p);
    const double nn = static_cast<double>(n0);
    const double tail_int = 1.0 - std::exp(-std::pow(p.b * nn + p.a, -p.k));
    z.z = sum + tail_int + 0.5 * ftg2_f(nn, p) - ftg2_fprime(nn, p) / 12.0;
    return z;
}

double ftg2_pmf(long long n, const Ftg2Params& p) {
    check_ftg2(p);
    if (n < 0) throw std::invalid_argument("ftg2_pmf: n must be >= 0");
    if (n == 0) return 0.0;
    return ftg2_f(static_cast<double>(n), p) / ftg2_normalizer(p, 1e-10).z;
}

Ftg2Fit fit_ftg2(const latticedist::RankFrequency& ranks) {
    std::vector<std::pair<double, double>> data; // (rank, count)
    std::uint64_t dropped = 0;
    for (const auto& [rank, c] : ranks.counts) {
        if (rank < 0)
            throw std::invalid_argument("fit_ftg2: negative rank in table");
        if (rank == 0) { dropped += c; continue; } // PMF(0) = 0 by definition
        data.emplace_back(static_cast<double>(rank), static_cast<double>(c));
    }
    if (data.size() < 5)
        throw std::invalid_argument("fit_ftg2: need >= 5 distinct positive ranks");

    double total = 0.0, mean_rank = 0.0;
    for (const auto& [r, c] : data) {
        total += c;
        mean_rank += r * c;
    }
    mean_rank /= total;

    auto nll = [&](const std::vector<double>& theta) {
        const Ftg2Params p{std::exp(theta[0]), std::exp(theta[1]), theta[2]};
        if (!(p.a >= 0.0) || p.k > 80.0 || p.b > 1e6 || p.b < 1e-9 ||
            p.a > 1e6)
            return 1e300;
        const double z = ftg2_normalizer(p, 1e-9).z;
        if (!(z > 0.0) || !std::isfinite(z)) return 1e300;
        double acc = total * std::log(z);
        for (const auto& [r, c] : data) {
            const double f = ftg2_f(r, p);
            if (!(f > 0.0)) return 1e300;
            acc -= c * std::log(f);
        }
        return acc;
    };

    const double k_starts[] = {0.6, 1.0, 1.6, 2.4, 3.5};
    const double b_starts[] = {0.3, 1.0, 3.0, 10.0};
    Ftg2Fit out;
    double best = std::numeric_limits<double>::infinity();
    for (double k0 : k_starts)
        for (double bs : b_starts) {
            std::vector<double> start{std::log(k0), std::log(bs / mean_rank),
                                      0.1};
            auto r = detail::nelder_mead(nll, start, {0.4, 0.4, 0.1}, 1e-8,
                                         2000);
            if (r.fx < best) {
                best = r.fx;
                out.params = {std::exp(r.x[0]), std::exp(r.x[1]), r.x[2]};
                out.converged = r.converged;
            }
        }
    out.log_likelihood = -best;
    out.dropped_zero_ranks = dropped;

    const double z = ftg2_normalizer(out.params, 1e-10).z;
    for (const auto& [r, c] : data) {
        const double expd =
            total * ftg2_f(r, out.params) / z;
        if (expd > 0.0) out.chi2 += (c - expd) * (c - expd) / expd;
    }
    return out;
}

} // namespace ticklab::extremes

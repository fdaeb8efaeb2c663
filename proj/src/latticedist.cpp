#include "ticklab/latticedist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "optimize.hpp"
#include "ticklab/specialfn.hpp"

namespace ticklab::latticedist {

RankFrequency RankFrequency::from_counts(
    std::span<const std::pair<long long, std::uint64_t>> counts) {
    std::map<long long, std::uint64_t> merged;
    for (const auto& [rank, c] : counts)
        if (c > 0) merged[rank] += c;
    RankFrequency rf;
    for (const auto& [rank, c] : merged) {
        rf.counts.emplace_back(rank, c);
        rf.total += c;
    }
    return rf;
}

RankFrequency RankFrequency::from_values(std::span<const long long> values) {
    std::map<long long, std::uint64_t> merged;
    for (long long v : values) ++merged[v];
    RankFrequency rf;
    for (const auto& [rank, c] : merged) {
        rf.counts.emplace_back(rank, c);
        rf.total += c;
    }
    return rf;
}

double RankFrequency::frequency(long long rank) const {
    if (total == 0) return 0.0;
    auto it = std::lower_bound(counts.begin(), counts.end(), rank,
                               [](const auto& e, long long r) { return e.first < r; });
    if (it == counts.end() || it->first != rank) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(total);
}

std::vector<std::pair<long long, double>> RankFrequency::frequencies() const {
    std::vector<std::pair<long long, double>> out;
    out.reserve(counts.size());
    for (const auto& [rank, c] : counts)
        out.emplace_back(rank,
                         static_cast<double>(c) / static_cast<double>(total));
    return out;
}

namespace {

constexpr int kZetaDirectTerms = 10000;

// ln(i+Q) cached once per Q; evaluating zeta for many S values then costs
// one exp per direct term.
struct ZetaCache {
    double Q = 0.0;
    std::vector<double> lns;

    explicit ZetaCache(double q) : Q(q) {
        lns.resize(kZetaDirectTerms);
        for (int i = 0; i < kZetaDirectTerms; ++i)
            lns[i] = std::log(static_cast<double>(i) + q);
    }

    // Euler-Maclaurin tail after the direct terms, corrections through B4
    double operator()(double S) const {
        double sum = 0.0;
        for (auto it = lns.rbegin(); it != lns.rend(); ++it)
            sum += std::exp(-S * *it);
        const double mq = static_cast<double>(kZetaDirectTerms) + Q;
        sum += std::pow(mq, 1.0 - S) / (S - 1.0);
        sum += 0.5 * std::pow(mq, -S);
        sum += S * std::pow(mq, -S - 1.0) / 12.0;
        sum -= S * (S + 1.0) * (S + 2.0) * std::pow(mq, -S - 3.0) / 720.0;
        return sum;
    }
};

} // namespace

double hurwitz_zeta(double S, double Q) {
    if (!(S > 1.0)) throw std::invalid_argument("hurwitz_zeta: need S > 1");
    if (!(Q > 0.0)) throw std::invalid_argument("hurwitz_zeta: need Q > 0");
    return ZetaCache(Q)(S);
}

double hz_pmf(long long k, double Q, double S) {
    if (k < 0) throw std::invalid_argument("hz_pmf: rank must be >= 0");
    return std::pow(static_cast<double>(k) + Q, -S) / hurwitz_zeta(S, Q);
}

double zm_pmf(long long k, double Q, double S, long long N) {
    if (N < 1) throw std::invalid_argument("zm_pmf: need N >= 1");
    if (k < 1 || k > N) throw std::invalid_argument("zm_pmf: rank outside 1..N");
    if (!(Q > -1.0)) throw std::invalid_argument("zm_pmf: need Q > -1");
    double z = 0.0;
    for (long long i = 1; i <= N; ++i)
        z += std::pow(static_cast<double>(i) + Q, -S);
    return std::pow(static_cast<double>(k) + Q, -S) / z;
}

namespace {

struct FitPoint {
    double k = 0.0; // rank
    double y = 0.0; // ln frequency
    double w = 1.0;
};

// weighted least squares line y ~ c + beta * x
struct LineFit {
    double beta = 0.0, c = 0.0, obj = 0.0;
};
LineFit wls_line(const std::vector<FitPoint>& pts, double Q) {
    double sw = 0, sx = 0, sy = 0;
    for (const auto& p : pts) {
        const double x = std::log(p.k + Q);
        sw += p.w;
        sx += p.w * x;
        sy += p.w * p.y;
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        const double x = std::log(p.k + Q);
        sxx += p.w * (x - mx) * (x - mx);
        sxy += p.w * (x - mx) * (p.y - my);
    }
    LineFit f;
    f.beta = sxy / sxx;
    f.c = my - f.beta * mx;
    for (const auto& p : pts) {
        const double e = p.y - (f.c + f.beta * std::log(p.k + Q));
        f.obj += p.w * e * e;
    }
    return f;
}

// best S (and objective) at fixed Q with the intercept tied to -zeta(S, Q)
struct TiedFit {
    double S = 0.0, obj = 0.0;
};
TiedFit tied_solve(const std::vector<FitPoint>& pts, const ZetaCache& zc) {
    auto obj = [&](double S) {
        const double z = zc(S);
        double acc = 0.0;
        for (const auto& p : pts) {
            const double e = p.y + S * std::log(p.k + zc.Q) + z;
            acc += p.w * e * e;
        }
        return acc;
    };
    static const double scan[] = {1.02, 1.05, 1.1, 1.2, 1.35, 1.5, 1.75, 2.0,
                                  2.5,  3.0,  3.5, 4.0, 5.0,  6.0, 8.0,  10.0,
                                  13.0, 16.0, 20.0, 25.0, 30.0, 40.0, 50.0};
    const int ns = static_cast<int>(std::size(scan));
    int best = 0;
    double best_f = obj(scan[0]);
    for (int i = 1; i < ns; ++i) {
        const double fi = obj(scan[i]);
        if (fi < best_f) { best_f = fi; best = i; }
    }
    const double lo = scan[std::max(0, best - 1)];
    const double hi = scan[std::min(ns - 1, best + 1)];
    TiedFit t;
    t.S = detail::golden_section(obj, lo, hi, 120);
    t.obj = obj(t.S);
    return t;
}

} // namespace

ZetaLawFit fit_loglog(const RankFrequency& ranks, bool weighted,
                      const std::set<long long>& exclude, InterceptMode mode) {
    std::vector<FitPoint> pts;
    const double total = static_cast<double>(ranks.total);
    for (const auto& [rank, c] : ranks.counts) {
        if (exclude.count(rank)) continue;
        if (rank < 0)
            throw std::invalid_argument("fit_loglog: negative rank in table");
        FitPoint p;
        p.k = static_cast<double>(rank);
        const double f = static_cast<double>(c) / total;
        p.y = std::log(f);
        p.w = weighted ? f : 1.0;
        pts.push_back(p);
    }
    if (pts.size() < 3)
        throw std::invalid_argument("fit_loglog: need >= 3 distinct ranks");

    auto profile = [&](double Q) {
        if (mode == InterceptMode::Free) return wls_line(pts, Q).obj;
        return tied_solve(pts, ZetaCache(Q)).obj;
    };

    // bracket scan on log-spaced Q grid, ties toward smaller Q
    constexpr double kQLo = 1e-6, kQHi = 50.0;
    const int grid = 49;
    std::vector<double> qs(grid);
    for (int i = 0; i < grid; ++i)
        qs[i] = std::exp(std::log(kQLo) +
                         (std::log(kQHi) - std::log(kQLo)) * i / (grid - 1));
    int best = 0;
    double best_f = profile(qs[0]);
    for (int i = 1; i < grid; ++i) {
        const double fi = profile(qs[i]);
        if (fi < best_f) { best_f = fi; best = i; }
    }
    const double qa = qs[std::max(0, best - 1)];
    const double qb = qs[std::min(grid - 1, best + 1)];
    const double q_star = detail::golden_section(profile, qa, qb, 150);

    ZetaLawFit out;
    out.weighted = weighted;
    out.mode = mode;
    out.Q = q_star;
    if (mode == InterceptMode::Free) {
        const LineFit lf = wls_line(pts, q_star);
        out.S = -lf.beta;
        out.intercept = lf.c;
        out.objective = lf.obj;
    } else {
        ZetaCache zc(q_star);
        const TiedFit tf = tied_solve(pts, zc);
        out.S = tf.S;
        out.intercept = -zc(tf.S);
        out.objective = tf.obj;
    }
    out.slope = -out.S;
    return out;
}

namespace {

void check_kuma(const KumaParams& p) {
    if (!(p.a > 0.0) || !(p.b > 0.0))
        throw std::invalid_argument("kuma: need a, b > 0");
    if (!(p.z_max > p.z_min))
        throw std::invalid_argument("kuma: need z_max > z_min");
    if (!(p.F0 >= 0.0) || !(p.F0 < 1.0))
        throw std::invalid_argument("kuma: need F0 in [0, 1)");
}

} // namespace

double kuma_cdf(double z, const KumaParams& p) {
    check_kuma(p);
    if (z < p.z_min) return 0.0;
    if (z >= p.z_max) return 1.0;
    const double zt = (z - p.z_min) / (p.z_max - p.z_min);
    return p.F0 +
           (1.0 - p.F0) * (1.0 - std::pow(1.0 - std::pow(zt, p.a), p.b));
}

double kuma_pdf(double z, const KumaParams& p) {
    check_kuma(p);
    if (z <= p.z_min || z >= p.z_max) return 0.0;
    const double w = p.z_max - p.z_min;
    const double zt = (z - p.z_min) / w;
    const double za = std::pow(zt, p.a);
    return p.a * p.b * (1.0 - p.F0) / w * std::pow(zt, p.a - 1.0) *
           std::pow(1.0 - za, p.b - 1.0);
}

double kuma_inverse_cdf(double u, const KumaParams& p) {
    check_kuma(p);
    if (!(u >= 0.0) || !(u < 1.0))
        throw std::invalid_argument("kuma_inverse_cdf: u outside [0, 1)");
    if (u < p.F0) return p.z_min;
    const double rest = (1.0 - u) / (1.0 - p.F0);
    const double zt =
        std::pow(1.0 - std::pow(rest, 1.0 / p.b), 1.0 / p.a);
    return p.z_min + (p.z_max - p.z_min) * zt;
}

namespace {

// central moments of the z_min = 0, F0 = 0 family from raw Beta moments
void kuma_central(double a, double b, double z_max, double& mean, double& var,
                  double& mu3, double& mu4) {
    auto raw = [&](int r) {
        return std::pow(z_max, r) * b *
               special::beta_fn(1.0 + static_cast<double>(r) / a, b);
    };
    const double m1 = raw(1), m2 = raw(2), m3 = raw(3), m4 = raw(4);
    mean = m1;
    var = m2 - m1 * m1;
    mu3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
    mu4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
}

} // namespace

DistMoments kuma_moments(const KumaParams& p) {
    check_kuma(p);
    if (p.z_min != 0.0 || p.F0 != 0.0)
        throw std::invalid_argument(
            "kuma_moments: closed forms cover z_min = 0, F0 = 0 only");
    double mean, var, mu3, mu4;
    kuma_central(p.a, p.b, p.z_max, mean, var, mu3, mu4);
    DistMoments m;
    m.mean = mean;
    m.stddev = std::sqrt(var);
    m.skewness = mu3 / (var * std::sqrt(var));
    m.excess_kurtosis = mu4 / (var * var) - 3.0;
    return m;
}

std::pair<double, double> kuma_skew_kurt(double a, double b) {
    double mean, var, mu3, mu4;
    kuma_central(a, b, 1.0, mean, var, mu3, mu4);
    return {mu3 / (var * std::sqrt(var)), mu4 / (var * var) - 3.0};
}

std::pair<double, double> weibull_skew_kurt(double shape) {
    if (!(shape > 0.0))
        throw std::invalid_argument("weibull_skew_kurt: need shape > 0");
    auto g = [&](int r) {
        return std::tgamma(1.0 + static_cast<double>(r) / shape);
    };
    const double g1 = g(1), g2 = g(2), g3 = g(3), g4 = g(4);
    const double var = g2 - g1 * g1;
    const double mu3 = g3 - 3.0 * g1 * g2 + 2.0 * g1 * g1 * g1;
    const double mu4 = g4 - 4.0 * g1 * g3 + 6.0 * g1 * g1 * g2 -
                       3.0 * g1 * g1 * g1 * g1;
    return {mu3 / (var * std::sqrt(var)), mu4 / (var * var) - 3.0};
}

std::vector<std::pair<double, double>> weibull_moment_curve(
    std::span<const double> shapes) {
    std::vector<std::pair<double, double>> out;
    out.reserve(shapes.size());
    for (double s : shapes) out.push_back(weibull_skew_kurt(s));
    return out;
}

TwoStepWaitingFit fit_waiting_two_step(
    std::span<const moments::MomentSummary> sessions,
    const WaitingFitOptions& opts) {
    if (opts.a_grid.size() != opts.b_intervals.size() || opts.a_grid.empty())
        throw std::invalid_argument(
            "fit_waiting_two_step: a_grid and b_intervals must match");
    if (sessions.size() < 10)
        throw std::invalid_argument(
            "fit_waiting_two_step: need >= 10 session summaries");
    for (const auto& s : sessions)
        if (!s.skewness || !s.excess_kurtosis || !s.stddev)
            throw std::invalid_argument(
                "fit_waiting_two_step: sessions need all four moments");

    const std::size_t sweep = std::max<std::size_t>(2, opts.b_sweep);
    TwoStepWaitingFit out;
    out.step1_totals.assign(opts.a_grid.size(),
                            std::numeric_limits<double>::infinity());

    // step 1: summed squared distance of session (skew, kurt) points to the
    // parametric curve of each candidate a
    std::size_t best_i = opts.a_grid.size();
    for (std::size_t i = 0; i < opts.a_grid.size(); ++i) {
        const auto [blo, bhi] = opts.b_intervals[i];
        if (!(bhi > blo)) continue; // empty interval: skip this a
        std::vector<std::pair<double, double>> curve(sweep);
        for (std::size_t j = 0; j < sweep; ++j) {
            const double b = blo + (bhi - blo) * j / (sweep - 1);
            curve[j] = kuma_skew_kurt(opts.a_grid[i], b);
        }
        double total = 0.0;
        for (const auto& s : sessions) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [sk, ek] : curve) {
                const double d1 = *s.skewness - sk;
                const double d2 = *s.excess_kurtosis - ek;
                best = std::min(best, d1 * d1 + d2 * d2);
            }
            total += best;
        }
        out.step1_totals[i] = total;
        if (best_i == opts.a_grid.size() || total < out.step1_totals[best_i])
            best_i = i;
    }
    if (best_i == opts.a_grid.size())
        throw std::invalid_argument(
            "fit_waiting_two_step: every a had an empty b-interval");
    out.a = opts.a_grid[best_i];
    out.a_index = best_i;

    // step 2: per session, pick (b, z_max) by least squares in the
    // (mean, stddev) plane; z_max is the projection onto the moment ray
    const auto [blo, bhi] = opts.b_intervals[best_i];
    for (const auto& s : sessions) {
        SessionWaitingFit sf;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < sweep; ++j) {
            const double b = blo + (bhi - blo) * j / (sweep - 1);
            double mean1, var1, mu3, mu4;
            kuma_central(out.a, b, 1.0, mean1, var1, mu3, mu4);
            const double sd1 = std::sqrt(var1);
            const double denom = mean1 * mean1 + sd1 * sd1;
            const double z = (s.mean * mean1 + *s.stddev * sd1) / denom;
            const double d1 = s.mean - z * mean1;
            const double d2 = *s.stddev - z * sd1;
            const double dist = d1 * d1 + d2 * d2;
            if (dist < best) {
                best = dist;
                sf.b = b;
                sf.z_max = z;
                sf.distance2 = dist;
            }
        }
        out.sessions.push_back(sf);
    }
    return out;
}

} // namespace ticklab::latticedist

#include "ticklab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ticklab/specialfn.hpp"

namespace ticklab::moments {

namespace {

// Single accumulation path shared by both overloads: a canonical
// (value, count) list sorted by value, so results cannot depend on input
// order and histogram vs expanded input agree bit for bit.
MomentSummary accumulate(const std::vector<std::pair<double, std::uint64_t>>& hist) {
    MomentSummary s;
    for (const auto& [v, c] : hist) s.n += c;
    if (s.n == 0) throw std::invalid_argument("sample_moments: empty sample");

    const double n = static_cast<double>(s.n);
    s.min = hist.front().first;
    s.n_min = hist.front().second;
    s.max = hist.back().first;
    s.n_max = hist.back().second;

    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (const auto& [v, c] : hist) {
        const double w = static_cast<double>(c);
        const double v2 = v * v;
        s1 += w * v;
        s2 += w * v2;
        s3 += w * v2 * v;
        s4 += w * v2 * v2;
    }
    s.a1 = s1 / n;
    s.a2 = s2 / n;
    s.a3 = s3 / n;
    s.a4 = s4 / n;
    s.mean = s.a1;

    double c2 = 0, c3 = 0, c4 = 0;
    for (const auto& [v, c] : hist) {
        const double w = static_cast<double>(c);
        const double d = v - s.mean;
        const double d2 = d * d;
        c2 += w * d2;
        c3 += w * d2 * d;
        c4 += w * d2 * d2;
    }
    s.m2 = c2 / n;
    s.m3 = c3 / n;
    s.m4 = c4 / n;

    if (s.n >= 2) {
        s.mu2 = n / (n - 1.0) * s.m2;
        s.stddev = std::sqrt(*s.mu2);
    }
    if (s.n >= 3) s.mu3 = n * n / ((n - 1.0) * (n - 2.0)) * s.m3;
    if (s.n >= 4)
        s.mu4 = (n * (n * n - 2.0 * n + 3.0) * s.m4 -
                 3.0 * n * (2.0 * n - 3.0) * s.m2 * s.m2) /
                ((n - 1.0) * (n - 2.0) * (n - 3.0));
    if (s.mu2 && s.mu3 && *s.mu2 > 0.0)
        s.skewness = *s.mu3 / (*s.mu2 * std::sqrt(*s.mu2));
    if (s.mu2 && s.mu4 && *s.mu2 > 0.0)
        s.excess_kurtosis = *s.mu4 / (*s.mu2 * *s.mu2) - 3.0;
    return s;
}

std::vector<std::pair<double, std::uint64_t>> canonicalize(
    std::span<const std::pair<double, std::uint64_t>> hist) {
    std::vector<std::pair<double, std::uint64_t>> h(hist.begin(), hist.end());
    std::erase_if(h, [](const auto& e) { return e.second == 0; });
    std::sort(h.begin(), h.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    std::vector<std::pair<double, std::uint64_t>> merged;
    for (const auto& e : h) {
        if (!merged.empty() && merged.back().first == e.first)
            merged.back().second += e.second;
        else
            merged.push_back(e);
    }
    return merged;
}

} // namespace

MomentSummary sample_moments(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    std::vector<std::pair<double, std::uint64_t>> hist;
    for (double x : v) {
        if (!hist.empty() && hist.back().first == x) ++hist.back().second;
        else hist.emplace_back(x, 1);
    }
    return accumulate(hist);
}

MomentSummary sample_moments(std::span<const std::pair<double, std::uint64_t>> hist) {
    return accumulate(canonicalize(hist));
}

IdentityReport price_mean_identities(long long p1, std::span<const long long> b) {
    IdentityReport r;
    const long long nn = static_cast<long long>(b.size()) + 1;
    r.n = static_cast<std::uint64_t>(nn);

    long long price = p1;
    r.sum_prices = p1;
    for (std::size_t i = 0; i < b.size(); ++i) {
        price += b[i];
        r.sum_prices += price;
        r.sum_increments += b[i];
        // increment b[i] carries prices index i+2 in 1-based numbering
        r.weighted_increments += static_cast<long long>(i + 2) * b[i];
    }
    const long long pn = price;

    // a1(P) == P1 + ((N^2-1)/N) a1(dP) - weighted/N, multiplied through by N
    r.id1_lhs = r.sum_prices;
    r.id1_rhs = nn * p1 + (nn + 1) * r.sum_increments - r.weighted_increments;
    // weighted == -P1 - N a1(P) + (N+1) PN, with N a1(P) = sum of prices
    r.id2_lhs = r.weighted_increments;
    r.id2_rhs = -p1 - r.sum_prices + (nn + 1) * pn;
    r.exact = r.id1_lhs == r.id1_rhs && r.id2_lhs == r.id2_rhs;

    r.a1_prices = static_cast<double>(r.sum_prices) / static_cast<double>(nn);
    r.a1_increments =
        nn > 1 ? static_cast<double>(r.sum_increments) / static_cast<double>(nn - 1)
               : 0.0;
    return r;
}

double gaussian_cdf(double x, double mean, double sd) {
    return special::norm_cdf(x, mean, sd);
}

double interval_prob(double lo, double hi, double mean, double sd) {
    if (hi < lo) throw std::invalid_argument("interval_prob: hi < lo");
    return special::norm_cdf(hi, mean, sd) - special::norm_cdf(lo, mean, sd);
}

Chi2Report pearson_chi2(std::span<const Bin> bins, std::span<const double> p,
                        double upper_tail_p,
                        std::optional<std::size_t> dof_override) {
    if (bins.size() != p.size() || bins.empty())
        throw std::invalid_argument("pearson_chi2: bins/probabilities mismatch");
    std::uint64_t total = 0;
    for (const auto& b : bins) total += b.count;
    if (total == 0) throw std::invalid_argument("pearson_chi2: empty sample");

    Chi2Report r;
    r.upper_tail_p = upper_tail_p;
    const double n = static_cast<double>(total);
    for (std::size_t j = 0; j < bins.size(); ++j) {
        if (!(p[j] > 0.0))
            throw std::invalid_argument("pearson_chi2: class probability <= 0");
        const double expd = n * p[j];
        const double d = static_cast<double>(bins[j].count) - expd;
        r.terms.push_back(d * d / expd);
        r.chi2 += r.terms.back();
    }
    r.dof = dof_override ? *dof_override : bins.size() - 1;
    r.critical = special::chi2_critical(upper_tail_p, r.dof);
    r.reject = r.chi2 > r.critical;
    return r;
}

LogReturnReport logreturn_classes(std::span<const long long> prices,
                                  std::span<const double> edges,
                                  double upper_tail_p) {
    if (prices.size() < 2)
        throw std::invalid_argument("logreturn_classes: need >= 2 prices");
    if (edges.size() < 2)
        throw std::invalid_argument("logreturn_classes: need >= 2 edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw std::invalid_argument("logreturn_classes: edges not increasing");

    LogReturnReport rep;
    for (std::size_t i = 1; i < prices.size(); ++i) {
        if (prices[i] <= 0 || prices[i - 1] <= 0)
            throw std::invalid_argument("logreturn_classes: nonpositive price");
        rep.returns.push_back(std::log(static_cast<double>(prices[i])) -
                              std::log(static_cast<double>(prices[i - 1])));
    }
    rep.summary = sample_moments(rep.returns);
    if (!rep.summary.stddev || !(*rep.summary.stddev > 0.0))
        throw std::invalid_argument("logreturn_classes: degenerate returns");

    rep.bins.resize(edges.size() - 1);
    for (std::size_t j = 0; j < rep.bins.size(); ++j) {
        rep.bins[j].lo = edges[j];
        rep.bins[j].hi = edges[j + 1];
    }
    for (double x : rep.returns) {
        if (x <= edges.front() || x > edges.back()) {
            ++rep.outside;
            continue;
        }
        auto it = std::lower_bound(edges.begin() + 1, edges.end(), x);
        ++rep.bins[static_cast<std::size_t>(it - edges.begin()) - 1].count;
    }
    for (const auto& b : rep.bins)
        rep.p.push_back(interval_prob(b.lo, b.hi, rep.summary.mean,
                                      *rep.summary.stddev));
    rep.chi2 = pearson_chi2(rep.bins, rep.p, upper_tail_p);
    return rep;
}

ValueArea value_area(std::span<const std::pair<long long, std::uint64_t>> histogram,
                     double fraction) {
    if (histogram.empty()) throw std::invalid_argument("value_area: empty histogram");
    if (!(fraction > 0.0) || !(fraction < 1.0))
        throw std::invalid_argument("value_area: fraction outside (0, 1)");
    std::vector<std::pair<long long, std::uint64_t>> h(histogram.begin(),
                                                       histogram.end());
    std::sort(h.begin(), h.end());

    double total = 0, weighted = 0;
    for (const auto& [lvl, c] : h) {
        total += static_cast<double>(c);
        weighted += static_cast<double>(lvl) * static_cast<double>(c);
    }
    if (total == 0) throw std::invalid_argument("value_area: zero total volume");

    ValueArea va;
    va.fraction = fraction;
    va.mean_level = weighted / total;
    const double target = fraction * total;
    double cum = 0;
    for (const auto& [lvl, c] : h) {
        cum += static_cast<double>(c);
        if (cum >= target) { va.left = lvl; break; }
    }
    cum = 0;
    for (auto it = h.rbegin(); it != h.rend(); ++it) {
        cum += static_cast<double>(it->second);
        if (cum >= target) { va.right = it->first; break; }
    }
    return va;
}

OlsFit ols(std::span<const double> x, std::span<const double> y,
           bool force_zero_intercept, double confidence) {
    if (x.size() != y.size()) throw std::invalid_argument("ols: size mismatch");
    const std::size_t n = x.size();
    const std::size_t min_n = force_zero_intercept ? 2 : 3;
    if (n < min_n) throw std::invalid_argument("ols: too few points");
    if (!(confidence > 0.0) || !(confidence < 1.0))
        throw std::invalid_argument("ols: confidence outside (0, 1)");

    OlsFit f;
    f.n = n;
    f.confidence = confidence;
    const double nd = static_cast<double>(n);

    if (force_zero_intercept) {
        double sxx = 0, sxy = 0, syy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
            syy += y[i] * y[i];
        }
        if (!(sxx > 0.0)) throw std::invalid_argument("ols: degenerate x (all zero)");
        f.slope = sxy / sxx;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = y[i] - f.slope * x[i];
            f.sse += e * e;
        }
        f.dof = n - 1;
        const double sigma2 = f.sse / static_cast<double>(f.dof);
        const double t = special::t_quantile(1.0 - (1.0 - confidence) / 2.0, f.dof);
        f.slope_half_width = t * std::sqrt(sigma2 / sxx);
        // uncentered R: share of raw sum of squares explained
        f.r = syy > 0.0 ? std::sqrt(std::max(0.0, 1.0 - f.sse / syy))
                        : (f.sse == 0.0 ? 1.0 : 0.0);
        return f;
    }

    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= nd;
    my /= nd;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("ols: degenerate x (constant)");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (*f.intercept + f.slope * x[i]);
        f.sse += e * e;
    }
    f.dof = n - 2;
    const double sigma2 = f.sse / static_cast<double>(f.dof);
    const double t = special::t_quantile(1.0 - (1.0 - confidence) / 2.0, f.dof);
    f.slope_half_width = t * std::sqrt(sigma2 / sxx);
    f.intercept_half_width =
        t * std::sqrt(sigma2 * (1.0 / nd + mx * mx / sxx));
    f.r = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
    return f;
}

} // namespace ticklab::moments

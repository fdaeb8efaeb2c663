#include "ticklab/depstats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ticklab::depstats {

Contingency build_contingency(
    std::span<const std::pair<long long, long long>> pairs) {
    if (pairs.empty())
        throw std::invalid_argument("build_contingency: no pairs");
    Contingency c;
    std::map<long long, std::uint64_t> am, bm;
    for (const auto& [a, b] : pairs) {
        ++am[a];
        ++bm[b];
    }
    c.a_values.reserve(am.size());
    for (const auto& [v, cnt] : am) {
        c.a_values.push_back(v);
        c.a_counts.push_back(cnt);
    }
    c.b_values.reserve(bm.size());
    for (const auto& [v, cnt] : bm) {
        c.b_values.push_back(v);
        c.b_counts.push_back(cnt);
    }
    auto index = [](const std::vector<long long>& vals, long long v) {
        return static_cast<std::size_t>(
            std::lower_bound(vals.begin(), vals.end(), v) - vals.begin());
    };
    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> joint;
    for (const auto& [a, b] : pairs)
        ++joint[{index(c.a_values, a), index(c.b_values, b)}];
    c.joint.assign(joint.begin(), joint.end());
    c.n = pairs.size();
    return c;
}

DependenceReport dependence_statistics(const Contingency& c) {
    if (c.n < 2)
        throw std::invalid_argument("dependence_statistics: need n >= 2");
    DependenceReport r;
    r.n = c.n;
    r.m_a = c.m_a();
    r.m_b = c.m_b();
    r.m_ab = c.m_ab();

    const double n = static_cast<double>(c.n);
    double sum_abs = 0.0, sum_prod_obs = 0.0, loglik = 0.0, chi_obs = 0.0;
    for (const auto& [cell, cnt] : c.joint) {
        const double vab = static_cast<double>(cnt) / n;
        const double va = static_cast<double>(c.a_counts[cell.first]) / n;
        const double vb = static_cast<double>(c.b_counts[cell.second]) / n;
        const double p = va * vb;
        sum_abs += std::fabs(vab - p);
        sum_prod_obs += p;
        loglik += vab * std::log(vab / p);
        chi_obs += (vab - p) * (vab - p) / p;
    }
    // unobserved product cells contribute |0 - p| to L and p to chi^2;
    // their product mass is 1 - (mass over observed cells)
    const double unobserved = std::max(0.0, 1.0 - sum_prod_obs);
    r.L = sum_abs + unobserved;
    r.I = 2.0 * loglik;
    r.chi2 = chi_obs + unobserved;

    const double mm = static_cast<double>(r.m_a) * static_cast<double>(r.m_b);
    r.eps_L = std::sqrt(2.0 * std::log(2.0)) * std::sqrt(mm / n);
    r.eps_I = mm * (2.0 * std::log(n + mm) + 1.0) / n;
    r.xi = (n * r.chi2 - mm) / std::sqrt(2.0 * mm);
    r.reject_L = r.L > r.eps_L;
    r.reject_I = r.I > r.eps_I;
    return r;
}

DependenceReport dependence_statistics(
    std::span<const std::pair<long long, long long>> pairs) {
    return dependence_statistics(build_contingency(pairs));
}

VarianceSlices variance_slices(
    std::span<const std::pair<long long, long long>> pairs, std::size_t width,
    std::size_t min_size, bool include_zero_in_intervals) {
    if (pairs.empty())
        throw std::invalid_argument("variance_slices: no pairs");
    if (width < 1 || min_size < 2)
        throw std::invalid_argument("variance_slices: bad width or min size");

    std::map<long long, std::vector<double>> groups;
    for (const auto& [a, b] : pairs)
        groups[a].push_back(static_cast<double>(b));

    VarianceSlices out;
    for (const auto& [a, bs] : groups) {
        if (bs.size() < min_size) {
            ++out.excluded_slices;
            out.excluded_pairs += bs.size();
            continue;
        }
        out.slices.push_back({a, moments::sample_moments(bs)});
    }

    std::vector<const VarianceSlices::Slice*> eligible;
    for (const auto& s : out.slices)
        if ((include_zero_in_intervals || s.a > 0) && s.b_moments.mu2)
            eligible.push_back(&s);
    for (std::size_t i = 0; i + width <= eligible.size(); i += width) {
        VarianceSlices::Interval iv;
        iv.a_first = eligible[i]->a;
        iv.a_last = eligible[i + width - 1]->a;
        iv.a_center = 0.5 * static_cast<double>(iv.a_first + iv.a_last);
        std::vector<double> vars;
        vars.reserve(width);
        for (std::size_t j = i; j < i + width; ++j)
            vars.push_back(*eligible[j]->b_moments.mu2);
        iv.variance_moments = moments::sample_moments(vars);
        out.intervals.push_back(std::move(iv));
    }
    return out;
}

DloglogFit dloglog_fit(const VarianceSlices& slices, double baseline_mu2_0) {
    if (!(baseline_mu2_0 > 0.0))
        throw std::invalid_argument("dloglog_fit: baseline must be > 0");
    DloglogFit out;
    out.baseline = baseline_mu2_0;
    std::vector<double> x, y;
    for (const auto& iv : slices.intervals) {
        const double ratio = iv.variance_moments.mean / baseline_mu2_0;
        if (!(ratio > 1.0) || !(iv.a_center > 0.0)) {
            ++out.excluded_points;
            continue;
        }
        x.push_back(std::log(iv.a_center));
        y.push_back(std::log(std::log(ratio)));
    }
    if (x.size() < 3)
        throw std::invalid_argument("dloglog_fit: fewer than 3 usable intervals");
    out.fit = moments::ols(x, y, false);
    return out;
}

} // namespace ticklab::depstats

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "ticklab/extremes.hpp"

using namespace ticklab;
using extremes::Ftg2Params;

TEST_CASE("per-session extremes and the two-winged epmf") {
    const std::vector<std::pair<std::string, std::vector<long long>>> sessions =
        {{"s1", {1, -2, 3, 3, 0}},
         {"s2", {-4, 2, -4, 1}},
         {"s3", {}},
         {"s4", {0, 0}}};
    const auto rep = extremes::session_extremes(sessions);
    CHECK(rep.skipped_empty == 1);
    REQUIRE(rep.sessions.size() == 3);
    CHECK(rep.sessions[0].max_b == 3);
    CHECK(rep.sessions[0].n_max == 2);
    CHECK(rep.sessions[0].min_b == -2);
    CHECK(rep.sessions[0].n_min == 1);
    CHECK(rep.sessions[1].max_b == 2);
    CHECK(rep.sessions[1].min_b == -4);
    CHECK(rep.sessions[1].n_min == 2);
    // the all-zero session contributes rank 0 to both wings
    CHECK(rep.sessions[2].max_b == 0);
    CHECK(rep.sessions[2].min_b == 0);

    // each epmf sums to one
    for (const auto* pmf : {&rep.epmf_max, &rep.epmf_min, &rep.epmf_union}) {
        double sum = 0.0;
        for (const auto& [rank, f] : *pmf) sum += f;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    // maxima wing: {3, 2, 0} each once
    CHECK(rep.epmf_max.size() == 3);
    // union over 6 extremes: ranks -4, -2, 0(x2), 2, 3
    double union_zero = 0.0;
    for (const auto& [rank, f] : rep.epmf_union)
        if (rank == 0) union_zero = f;
    CHECK(union_zero == doctest::Approx(2.0 / 6.0).epsilon(1e-12));

    // absolute tables ready for rank fitting
    CHECK(rep.abs_max_ranks.total == 3);
    CHECK(rep.abs_min_ranks.total == 3);
    CHECK(rep.abs_min_ranks.frequency(4) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("type-II pmf normalizer carries a certified bound") {
    const Ftg2Params p{1.5, 0.1, 0.2};
    const auto z = extremes::ftg2_normalizer(p, 1e-10);
    CHECK(z.z == doctest::Approx(0.999894555261).epsilon(1e-9));
    CHECK(z.bound <= 1e-10);
    CHECK(z.terms >= 1024);

    // brute-force partial sums approach the certified value from below
    double direct = 0.0;
    for (long long n = 1; n <= 2000000; ++n) {
        const double u = 0.1 * static_cast<double>(n) + 0.2;
        direct += 1.5 * 0.1 * std::pow(u, -2.5) * std::exp(-std::pow(u, -1.5));
    }
    CHECK(direct <= z.z);
    CHECK(z.z - direct < 1e-4);
}

TEST_CASE("type-II pmf matches its density over the normalizer") {
    const Ftg2Params p{1.2, 0.4, 0.1};
    CHECK(extremes::ftg2_pmf(0, p) == 0.0);
    const double z = extremes::ftg2_normalizer(p).z;
    auto density = [&](long long n) {
        const double u = p.b * static_cast<double>(n) + p.a;
        return p.k * p.b * std::pow(u, -(p.k + 1.0)) *
               std::exp(-std::pow(u, -p.k));
    };
    double sum = 0.0;
    for (long long n : {1LL, 2LL, 5LL, 40LL, 1000LL}) {
        CHECK(extremes::ftg2_pmf(n, p) ==
              doctest::Approx(density(n) / z).epsilon(1e-12));
    }
    // partial sums of the normalized pmf approach 1 from below
    for (long long n = 1; n <= 300000; ++n) sum += density(n);
    CHECK(sum / z < 1.0);
    CHECK(sum / z == doctest::Approx(1.0).epsilon(1e-4));
    CHECK_THROWS_AS((void)extremes::ftg2_pmf(1, Ftg2Params{-1.0, 0.4, 0.1}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)extremes::ftg2_pmf(-1, p), std::invalid_argument);
}

TEST_CASE("mle recovers the tail law from expected counts") {
    const Ftg2Params truth{1.5, 0.35, 0.1};
    std::vector<std::pair<long long, std::uint64_t>> counts;
    const double n_total = 5e6;
    for (long long n = 1; n <= 300; ++n) {
        const auto c = static_cast<std::uint64_t>(
            std::llround(extremes::ftg2_pmf(n, truth) * n_total));
        if (c > 0) counts.emplace_back(n, c);
    }
    const auto rf = latticedist::RankFrequency::from_counts(counts);
    const auto fit = extremes::fit_ftg2(rf);
    CHECK(fit.converged);
    CHECK(fit.params.k == doctest::Approx(truth.k).epsilon(0.05));
    CHECK(fit.params.b == doctest::Approx(truth.b).epsilon(0.05));
    CHECK(fit.dropped_zero_ranks == 0);
    // the reported likelihood matches a direct recomputation
    double ll = 0.0;
    for (const auto& [rank, c] : rf.counts)
        ll += static_cast<double>(c) * std::log(extremes::ftg2_pmf(rank, fit.params));
    CHECK(fit.log_likelihood == doctest::Approx(ll).epsilon(1e-9));
}

TEST_CASE("zero ranks are dropped from the likelihood but reported") {
    const Ftg2Params truth{1.4, 0.5, 0.0};
    std::vector<std::pair<long long, std::uint64_t>> counts = {{0, 17}};
    for (long long n = 1; n <= 60; ++n) {
        const auto c = static_cast<std::uint64_t>(
            std::llround(extremes::ftg2_pmf(n, truth) * 1e5));
        if (c > 0) counts.emplace_back(n, c);
    }
    const auto fit =
        extremes::fit_ftg2(latticedist::RankFrequency::from_counts(counts));
    CHECK(fit.dropped_zero_ranks == 17);
    CHECK(fit.params.k == doctest::Approx(truth.k).epsilon(0.1));

    // too few distinct positive ranks
    const std::vector<std::pair<long long, std::uint64_t>> tiny = {
        {1, 5}, {2, 3}, {3, 1}};
    CHECK_THROWS_AS(
        (void)extremes::fit_ftg2(latticedist::RankFrequency::from_counts(tiny)),
        std::invalid_argument);
}

TEST_CASE("mle round trip from sampled extremes") {
    // sample rank draws from the law by inverse cdf over the density table
    const Ftg2Params truth{1.8, 0.25, 0.05};
    const double z = extremes::ftg2_normalizer(truth).z;
    std::vector<double> cdf;
    double acc = 0.0;
    for (long long n = 1; acc < z * (1.0 - 1e-9) && n <= 2000000; ++n) {
        const double u = truth.b * static_cast<double>(n) + truth.a;
        acc += truth.k * truth.b * std::pow(u, -(truth.k + 1.0)) *
               std::exp(-std::pow(u, -truth.k));
        cdf.push_back(acc);
    }
    std::mt19937_64 rng(7777);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<long long> draws;
    for (int i = 0; i < 20000; ++i) {
        const double x = u(rng) * cdf.back();
        draws.push_back(
            1 + (std::lower_bound(cdf.begin(), cdf.end(), x) - cdf.begin()));
    }
    const auto rf = latticedist::RankFrequency::from_values(draws);
    const auto fit = extremes::fit_ftg2(rf);
    CHECK(fit.converged);
    CHECK(fit.params.k == doctest::Approx(truth.k).epsilon(0.15));
    CHECK(fit.params.b == doctest::Approx(truth.b).epsilon(0.15));
}

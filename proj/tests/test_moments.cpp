#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "ticklab/moments.hpp"
#include "ticklab/specialfn.hpp"

using namespace ticklab;
using moments::Bin;

namespace {

std::vector<double> expand(
    const std::vector<std::pair<double, std::uint64_t>>& hist) {
    std::vector<double> out;
    for (const auto& [v, c] : hist)
        for (std::uint64_t i = 0; i < c; ++i) out.push_back(v);
    return out;
}

} // namespace

TEST_CASE("corn overnight and day increment moment vectors") {
    // per-tick price increment histograms, lattice steps
    const std::vector<std::pair<double, std::uint64_t>> overnight = {
        {-1, 179}, {0, 1792}, {1, 191}, {2, 1}};
    const std::vector<std::pair<double, std::uint64_t>> day = {
        {-1, 923}, {0, 9465}, {1, 919}, {2, 1}};

    const auto mo = moments::sample_moments(overnight);
    CHECK(mo.n == 2163);
    CHECK(mo.mean == doctest::Approx(0.00647249191).epsilon(1e-8));
    CHECK(*mo.mu2 == doctest::Approx(0.172946062).epsilon(1e-8));
    CHECK(*mo.stddev == doctest::Approx(0.415867841).epsilon(1e-8));
    CHECK(*mo.skewness == doctest::Approx(0.0820005283).epsilon(1e-8));
    CHECK(*mo.excess_kurtosis == doctest::Approx(2.96807368).epsilon(1e-8));
    CHECK(mo.min == -1.0);
    CHECK(mo.max == 2.0);
    CHECK(mo.n_min == 179);
    CHECK(mo.n_max == 1);

    const auto md = moments::sample_moments(day);
    CHECK(md.n == 11308);
    CHECK(md.mean == doctest::Approx(-0.000176865936).epsilon(1e-8));
    CHECK(*md.mu2 == doctest::Approx(0.163261665).epsilon(1e-8));
    CHECK(*md.stddev == doctest::Approx(0.404056512).epsilon(1e-8));
    CHECK(*md.skewness == doctest::Approx(0.00667709239).epsilon(1e-8));
    CHECK(*md.excess_kurtosis == doctest::Approx(3.16607045).epsilon(1e-8));
}

TEST_CASE("histogram and expanded samples give bit-identical moments") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> val(-5, 5);
    std::uniform_int_distribution<int> cnt(1, 9);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::pair<double, std::uint64_t>> hist;
        const int classes = 2 + rep % 7;
        for (int j = 0; j < classes; ++j)
            hist.emplace_back(val(rng) + 0.25 * j, cnt(rng));
        auto flat = expand(hist);
        std::shuffle(flat.begin(), flat.end(), rng);

        const auto a = moments::sample_moments(hist);
        const auto b = moments::sample_moments(flat);
        CHECK(a.n == b.n);
        CHECK(a.mean == b.mean);
        CHECK(a.a2 == b.a2);
        CHECK(a.a3 == b.a3);
        CHECK(a.a4 == b.a4);
        CHECK(a.m2 == b.m2);
        CHECK(a.m3 == b.m3);
        CHECK(a.m4 == b.m4);
        if (a.mu2) CHECK(*a.mu2 == *b.mu2);
        if (a.mu3) CHECK(*a.mu3 == *b.mu3);
        if (a.mu4) CHECK(*a.mu4 == *b.mu4);
        if (a.skewness) CHECK(*a.skewness == *b.skewness);
    }
}

TEST_CASE("small-sample moment gating") {
    const std::vector<double> one = {3.0};
    const auto m1 = moments::sample_moments(one);
    CHECK(m1.n == 1);
    CHECK(m1.mean == 3.0);
    CHECK_FALSE(m1.mu2.has_value());
    CHECK_FALSE(m1.skewness.has_value());

    const std::vector<double> two = {1.0, 3.0};
    const auto m2 = moments::sample_moments(two);
    CHECK(*m2.mu2 == doctest::Approx(2.0)); // unbiased: ((1)^2+(1)^2)/(2-1)
    CHECK_FALSE(m2.mu3.has_value());

    const std::vector<double> three = {1.0, 2.0, 6.0};
    const auto m3 = moments::sample_moments(three);
    CHECK(m3.mu3.has_value());
    CHECK_FALSE(m3.mu4.has_value());
    CHECK_FALSE(m3.excess_kurtosis.has_value());

    CHECK_THROWS_AS((void)moments::sample_moments(std::vector<double>{}),
                    std::invalid_argument);

    // constant sample: variance exactly zero, shape ratios absent
    const std::vector<double> flat(12, 4.25);
    const auto mf = moments::sample_moments(flat);
    CHECK(*mf.mu2 == 0.0);
    CHECK_FALSE(mf.skewness.has_value());
    CHECK_FALSE(mf.excess_kurtosis.has_value());
}

TEST_CASE("unbiased corrections against a hand-computed fixture") {
    // n=4 keeps every correction factor nontrivial
    const std::vector<double> x = {1.0, 2.0, 4.0, 9.0};
    const auto m = moments::sample_moments(x);
    const double mean = 4.0;
    CHECK(m.mean == doctest::Approx(mean));
    // biased central moments
    const double m2 = (9.0 + 4.0 + 0.0 + 25.0) / 4.0;       // 9.5
    const double m3 = (-27.0 - 8.0 + 0.0 + 125.0) / 4.0;    // 22.5
    const double m4 = (81.0 + 16.0 + 0.0 + 625.0) / 4.0;    // 180.5
    CHECK(m.m2 == doctest::Approx(m2).epsilon(1e-15));
    CHECK(m.m3 == doctest::Approx(m3).epsilon(1e-15));
    CHECK(m.m4 == doctest::Approx(m4).epsilon(1e-15));
    // unbiased variance and third moment
    CHECK(*m.mu2 == doctest::Approx(4.0 / 3.0 * m2).epsilon(1e-15));
    CHECK(*m.mu3 == doctest::Approx(16.0 / 6.0 * m3).epsilon(1e-15));
    // fourth: n(n^2-2n+3) m4 - 3n(2n-3) m2^2 over (n-1)(n-2)(n-3)
    const double mu4 = (4.0 * 11.0 * m4 - 12.0 * 5.0 * m2 * m2) / 6.0;
    CHECK(*m.mu4 == doctest::Approx(mu4).epsilon(1e-15));
}

TEST_CASE("price and increment mean identities are exact integers") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> db(-3, 3);
    std::uniform_int_distribution<int> len(1, 400);
    std::uniform_int_distribution<long long> p0(100, 3000);
    for (int rep = 0; rep < 300; ++rep) {
        const int n_inc = len(rng);
        std::vector<long long> b(n_inc);
        for (auto& x : b) x = db(rng);
        const long long p1 = p0(rng);
        const auto rep1 = moments::price_mean_identities(p1, b);
        CHECK(rep1.exact);
        CHECK(rep1.id1_lhs == rep1.id1_rhs);
        CHECK(rep1.id2_lhs == rep1.id2_rhs);
        CHECK(rep1.n == static_cast<std::uint64_t>(n_inc) + 1);
        // reconstruction: mean of prices should match a1_prices
        long long p = p1, sum = p1;
        for (long long x : b) {
            p += x;
            sum += p;
        }
        CHECK(rep1.sum_prices == sum);
        CHECK(rep1.a1_prices ==
              doctest::Approx(static_cast<double>(sum) / rep1.n).epsilon(1e-15));
    }
    // no increments at all: single price
    const auto r0 = moments::price_mean_identities(500, {});
    CHECK(r0.exact);
    CHECK(r0.n == 1);
    CHECK(r0.a1_prices == 500.0);
}

TEST_CASE("gaussian interval arithmetic reproduces the tail chain") {
    const double mu = 0.00647249, sd = 0.415868;
    CHECK(moments::interval_prob(0.01, 0.99, mu, sd) ==
          doctest::Approx(0.487601046).epsilon(1e-7));

    // P(X >= 2): one-in-N event comparison
    const double tail_o = 1.0 - moments::gaussian_cdf(2.0, mu, sd);
    CHECK(tail_o == doctest::Approx(8.188511e-7).epsilon(1e-5));
    CHECK(1.0 / (2163.0 * tail_o) == doctest::Approx(564.5970).epsilon(1e-5));

    const double tail_d = 1.0 - moments::gaussian_cdf(2.0, -0.000176866, 0.404057);
    CHECK(tail_d == doctest::Approx(3.706207e-7).epsilon(1e-5));
    CHECK(1.0 / (11308.0 * tail_d) == doctest::Approx(238.6077).epsilon(1e-5));
}

TEST_CASE("pearson chi-square on the rounded class-probability fixtures") {
    const Bin ob[] = {{-1.5, -0.5, 179}, {-0.5, 0.5, 1792}, {0.5, 1.5, 191},
                      {1.5, 2.5, 1}};
    const double op[] = {0.1116, 0.7707, 0.1175, 0.0001645};
    const auto r = moments::pearson_chi2(ob, op);
    CHECK(r.chi2 == doctest::Approx(42.353722).epsilon(1e-6));
    CHECK(r.dof == 3);
    CHECK(r.critical == doctest::Approx(12.8381564666).epsilon(1e-9));
    CHECK(r.reject);

    const Bin db_[] = {{-1.5, -0.5, 923}, {-0.5, 0.5, 9465}, {0.5, 1.5, 919},
                       {1.5, 2.5, 1}};
    const double dp[] = {0.1080, 0.7841, 0.1078, 0.0001025};
    const auto rd = moments::pearson_chi2(db_, dp);
    CHECK(rd.chi2 == doctest::Approx(187.082760).epsilon(1e-6));
    CHECK(rd.reject);

    // agreement case: expected counts equal observed -> chi2 == 0, keep
    const Bin good[] = {{0, 1, 25}, {1, 2, 50}, {2, 3, 25}};
    const double gp[] = {0.25, 0.5, 0.25};
    const auto rg = moments::pearson_chi2(good, gp, 0.05);
    CHECK(rg.chi2 == doctest::Approx(0.0));
    CHECK_FALSE(rg.reject);
    CHECK(rg.critical == doctest::Approx(5.991464547108).epsilon(1e-6));
}

TEST_CASE("single large chi-square term matches the hand value") {
    // expected count 349 for the first class; observed 10376
    const Bin bins[] = {{0, 1, 10376}, {1, 2, 338624}};
    const double p[] = {0.001, 0.999};
    const auto r = moments::pearson_chi2(bins, p, 0.005);
    CHECK(r.terms[0] == doctest::Approx(288082.3181).epsilon(1e-6));
}

TEST_CASE("log-return class machinery") {
    // geometric walk with known returns
    const std::vector<long long> prices = {1000, 1010, 1000, 990, 1000, 1010,
                                           1020, 1010, 1000, 1010};
    const std::vector<double> edges = {-0.05, -0.005, 0.005, 0.05};
    const auto rep = moments::logreturn_classes(prices, edges, 0.05);
    CHECK(rep.returns.size() == 9);
    CHECK(rep.bins.size() == 3);
    std::uint64_t binned = 0;
    for (const auto& b : rep.bins) binned += b.count;
    CHECK(binned + rep.outside == rep.returns.size());
    // classes are (lo, hi]: returns of about +-0.00995 to +-0.0198 all live
    // in the outer classes; there are no zero returns here
    CHECK(rep.bins[1].count == 0);
    CHECK(rep.p.size() == 3);
    for (double pj : rep.p) CHECK(pj > 0.0);
    CHECK(rep.chi2.dof == 2);

    // the class probability matrix is the gaussian interval at the sample fit
    const double m = rep.summary.mean, s = *rep.summary.stddev;
    CHECK(rep.p[0] ==
          doctest::Approx(moments::interval_prob(-0.05, -0.005, m, s))
              .epsilon(1e-12));

    CHECK_THROWS_AS(
        (void)moments::logreturn_classes(std::vector<long long>{5}, edges),
        std::invalid_argument);
    const std::vector<double> bad_edges = {0.1, 0.0};
    CHECK_THROWS_AS((void)moments::logreturn_classes(prices, bad_edges),
                    std::invalid_argument);
    const std::vector<long long> nonpos = {10, -5, 10};
    CHECK_THROWS_AS((void)moments::logreturn_classes(nonpos, edges),
                    std::invalid_argument);
}

TEST_CASE("gaussian class probability for a narrow return class") {
    CHECK(moments::interval_prob(-0.000637552, 0.0, 1.9793e-8, 0.00032513) ==
          doctest::Approx(0.475034742).epsilon(1e-7));
}

TEST_CASE("value area trims the configured fraction from each side") {
    // volume histogram over price levels
    const std::vector<std::pair<long long, std::uint64_t>> hist = {
        {100, 5}, {101, 10}, {102, 40}, {103, 25}, {104, 15}, {105, 5}};
    // total 100; 15% from the left: 5 (level 100) + 10 (101) reaches 15 at 101;
    // from the right: 5 (105) + 15 (104) reaches 20 >= 15 at 104
    const auto va = moments::value_area(hist, 0.15);
    CHECK(va.left == 101);
    CHECK(va.right == 104);
    CHECK(va.fraction == doctest::Approx(0.15));
    double wsum = 0, w = 0;
    for (const auto& [lvl, c] : hist) {
        wsum += static_cast<double>(lvl) * c;
        w += c;
    }
    CHECK(va.mean_level == doctest::Approx(wsum / w).epsilon(1e-14));

    // degenerate: single level
    const std::vector<std::pair<long long, std::uint64_t>> single = {{7, 3}};
    const auto vs = moments::value_area(single, 0.15);
    CHECK(vs.left == 7);
    CHECK(vs.right == 7);

    CHECK_THROWS_AS(
        (void)moments::value_area(
            std::vector<std::pair<long long, std::uint64_t>>{}, 0.15),
        std::invalid_argument);
}

TEST_CASE("ols free intercept against the classic 5-point fixture") {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    const std::vector<double> y = {2, 4, 5, 4, 5};
    const auto f = moments::ols(x, y, false);
    CHECK(f.slope == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(*f.intercept == doctest::Approx(2.2).epsilon(1e-14));
    CHECK(f.r == doctest::Approx(0.7745966692414834).epsilon(1e-12));
    CHECK(f.sse == doctest::Approx(2.4).epsilon(1e-12));
    CHECK(f.n == 5);
    CHECK(f.dof == 3);
    // half-width = t_{0.975,3} * sqrt(s^2 / Sxx), s^2 = 2.4/3, Sxx = 10
    CHECK(f.slope_half_width ==
          doctest::Approx(3.182446305284 * std::sqrt(0.08)).epsilon(1e-9));
    // intercept half-width = t * sqrt(s^2 (1/n + xbar^2/Sxx))
    CHECK(*f.intercept_half_width ==
          doctest::Approx(3.182446305284 * std::sqrt(0.8 * (0.2 + 0.9)))
              .epsilon(1e-9));
}

TEST_CASE("ols forced zero intercept uses uncentered R and dof n-1") {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    const std::vector<double> y = {2, 4, 5, 4, 5};
    const auto f = moments::ols(x, y, true);
    CHECK(f.slope == doctest::Approx(1.2).epsilon(1e-14)); // 66/55
    CHECK_FALSE(f.intercept.has_value());
    CHECK(f.dof == 4);
    CHECK(f.sse == doctest::Approx(6.8).epsilon(1e-12));
    CHECK(f.r == doctest::Approx(std::sqrt(1.0 - 6.8 / 86.0)).epsilon(1e-12));
    CHECK(f.slope_half_width ==
          doctest::Approx(special::t_quantile(0.975, 4) *
                          std::sqrt((6.8 / 4.0) / 55.0))
              .epsilon(1e-9));
}

TEST_CASE("ols on an exact line has zero residual and unit correlation") {
    std::vector<double> x, y;
    for (int i = 1; i <= 20; ++i) {
        x.push_back(i);
        y.push_back(3.5 * i - 7.0);
    }
    const auto f = moments::ols(x, y, false);
    CHECK(f.slope == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(*f.intercept == doctest::Approx(-7.0).epsilon(1e-10));
    CHECK(f.r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.slope_half_width == doctest::Approx(0.0).epsilon(1e-8));

    // through-origin data fitted through the origin
    std::vector<double> y0;
    for (int i = 1; i <= 20; ++i) y0.push_back(2.25 * i);
    const auto fz = moments::ols(x, y0, true);
    CHECK(fz.slope == doctest::Approx(2.25).epsilon(1e-13));
    CHECK(fz.r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ols input validation") {
    const std::vector<double> x1 = {1.0};
    const std::vector<double> y1 = {2.0};
    CHECK_THROWS_AS((void)moments::ols(x1, y1, false), std::invalid_argument);
    const std::vector<double> xc = {2.0, 2.0, 2.0};
    const std::vector<double> yc = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)moments::ols(xc, yc, false), std::invalid_argument);
    const std::vector<double> xa = {1.0, 2.0};
    const std::vector<double> ya = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)moments::ols(xa, ya, false), std::invalid_argument);
}

#include "ticklab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ticklab::synth {

namespace {

std::uint64_t avalanche(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t CounterRng::next_u64() {
    // splitmix-style: output depends only on (seed, stream, counter)
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (++counter_);
    z ^= avalanche(stream_ + 0x632be59bd9b4e019ULL);
    return avalanche(z);
}

double CounterRng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::poisson(double lambda) {
    if (!(lambda > 0.0)) return 0;
    if (lambda < 50.0) {
        const double limit = std::exp(-lambda);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_unit();
        } while (p > limit);
        return k - 1;
    }
    // normal approximation for large rates
    double u1 = next_unit(), u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * 3.14159265358979323846 * u2);
    const double v = lambda + std::sqrt(lambda) * z;
    return v > 0.0 ? static_cast<std::uint64_t>(std::llround(v)) : 0;
}

namespace {

void check_spec(const GeneratorSpec& spec) {
    if (!(spec.p_up >= 0.0) || !(spec.p_up <= 1.0))
        throw std::invalid_argument("generator: p_up outside [0, 1]");
    if (!(spec.hz_S > 1.0) || !(spec.hz_Q > 0.0))
        throw std::invalid_argument("generator: need hz S > 1 and Q > 0");
    if (!(spec.mean_tick_size >= 1.0))
        throw std::invalid_argument("generator: mean tick size must be >= 1");
    if (spec.band.width_steps <= 0)
        throw std::invalid_argument("generator: empty limit band");
    // these throw on their own invalid fields
    latticedist::kuma_cdf(spec.waiting.z_min, spec.waiting);
    if (!(spec.curve.L > 1.0))
        throw std::invalid_argument("generator: curve lifespan too short");
}

// inverse-CDF table for the increment magnitude law, covering all but
// < 1e-9 of the mass; the residual tail is clamped to the last rank
std::vector<double> hz_cumulative(double Q, double S) {
    const double z = latticedist::hurwitz_zeta(S, Q);
    std::vector<double> cum;
    double acc = 0.0;
    for (long long k = 0; k < 2000000; ++k) {
        acc += std::pow(static_cast<double>(k) + Q, -S) / z;
        cum.push_back(acc);
        if (acc >= 1.0 - 1e-9) break;
    }
    return cum;
}

long long draw_rank(const std::vector<double>& cum, double u) {
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    return it == cum.end() ? static_cast<long long>(cum.size()) - 1
                           : static_cast<long long>(it - cum.begin());
}

} // namespace

tickstore::SessionRange generate_session(const GeneratorSpec& spec,
                                         long long tau) {
    check_spec(spec);
    if (!(tau > 0) || !(static_cast<double>(tau) < spec.curve.L))
        throw std::invalid_argument("generate_session: tau outside (0, L)");

    const double target = lifecurve::v_eval(spec.curve, static_cast<double>(tau));
    const auto cum = hz_cumulative(spec.hz_Q, spec.hz_S);

    const std::uint64_t day = static_cast<std::uint64_t>(tau);
    CounterRng wait_rng(spec.seed, day * 4 + 0);
    CounterRng mag_rng(spec.seed, day * 4 + 1);
    CounterRng sign_rng(spec.seed, day * 4 + 2);
    CounterRng size_rng(spec.seed, day * 4 + 3);

    tickstore::SessionRange sess;
    sess.label = "synth";
    const std::int64_t midnight =
        tickstore::parse_timestamp(spec.start_date + " 00:00:00") +
        (tau - 1) * 86400;
    sess.date = tickstore::format_timestamp(midnight).substr(0, 10);
    sess.start = midnight + spec.session_start_sec;

    long long m = std::clamp(spec.start_m, spec.band.down_m(), spec.band.up_m());
    std::int64_t ts = sess.start;
    std::uint64_t vol = 0;
    while (static_cast<double>(vol) < target) {
        if (!sess.ticks.empty()) {
            const double w =
                latticedist::kuma_inverse_cdf(wait_rng.next_unit(), spec.waiting);
            ts += std::llround(w); // whole seconds
            const long long mag = draw_rank(cum, mag_rng.next_unit());
            const long long dir = sign_rng.next_unit() < spec.p_up ? 1 : -1;
            m = std::clamp(m + dir * mag, spec.band.down_m(), spec.band.up_m());
        }
        const std::uint32_t size = static_cast<std::uint32_t>(
            1 + size_rng.poisson(spec.mean_tick_size - 1.0));
        sess.ticks.push_back({ts, m, size});
        vol += size;
    }
    sess.end = ts;
    return sess;
}

std::vector<std::pair<long long, std::uint64_t>> generate_lifecycle(
    const GeneratorSpec& spec) {
    if (!(spec.curve.L > 1.0))
        throw std::invalid_argument("generate_lifecycle: curve lifespan too short");
    std::vector<std::pair<long long, std::uint64_t>> out;
    const long long top = static_cast<long long>(std::ceil(spec.curve.L)) - 1;
    for (long long tau = 1; tau <= top && static_cast<double>(tau) < spec.curve.L;
         ++tau) {
        CounterRng rng(spec.seed, 0x10000000ULL + static_cast<std::uint64_t>(tau));
        const double lambda =
            spec.curve.A > 0.0
                ? lifecurve::v_eval(spec.curve, static_cast<double>(tau))
                : 0.0;
        out.emplace_back(tau, rng.poisson(lambda));
    }
    return out;
}

} // namespace ticklab::synth

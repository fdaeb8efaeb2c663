#pragma once

// Synthetic Time & Sales generator: power-law increment magnitudes,
// Kumaraswamy waiting times, life-curve daily volumes, limit-band clamping.
// Fully deterministic from (seed, day, counter); the round-trip test bed for
// the fitters.

#include <cstdint>
#include <string>
#include <vector>

#include "ticklab/latticedist.hpp"
#include "ticklab/lifecurve.hpp"
#include "ticklab/tickstore.hpp"

namespace ticklab::synth {

struct GeneratorSpec {
    tickstore::LatticeSpec lattice;
    tickstore::LimitBand band;
    double hz_Q = 1.0; // increment magnitude law
    double hz_S = 4.0;
    double p_up = 0.5; // sign model
    latticedist::KumaParams waiting;
    lifecurve::CurveParams curve; // daily volume target V(tau)
    double mean_tick_size = 2.0;  // sizes are 1 + Poisson(mean - 1)
    long long start_m = 0;        // initial price index
    std::string start_date = "2016-01-04"; // date of tau = 1
    int session_start_sec = 8 * 3600 + 30 * 60;
    std::uint64_t seed = 0;
};

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so sessions are reproducible in any order.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}
    std::uint64_t next_u64();
    double next_unit(); // [0, 1)
    std::uint64_t poisson(double lambda);

private:
    std::uint64_t seed_ = 0, stream_ = 0, counter_ = 0;
};

// One session for day index tau (0 < tau < L): ticks are appended until the
// accumulated size reaches the life-curve target V(tau). Prices stay on the
// lattice inside the band (moves past a limit are clamped to it).
tickstore::SessionRange generate_session(const GeneratorSpec& spec, long long tau);

// Poisson-perturbed daily totals for tau = 1 .. L-1.
std::vector<std::pair<long long, std::uint64_t>> generate_lifecycle(
    const GeneratorSpec& spec);

} // namespace ticklab::synth

#pragma once

// Maximum-profit reversal strategy on a lattice price path: DP solver under
// per-transaction costs, cost sweeps, and profit-vs-volume regression rows.
// All cash is integer cents; prices are lattice indices.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ticklab/moments.hpp"

namespace ticklab::mps {

struct CostModel {
    long long cost_cents = 0;       // per contract per transaction
    long long step_value_cents = 0; // dollar value of one lattice step, cents

    static CostModel from_dollars(double cost, double step_value);
};

struct Strategy {
    std::vector<int> actions; // per tick: +1 buy, -1 sell, +-2 reversal, 0
    long long mp_cents = 0;
    long long transactions = 0; // sum |action|
    std::optional<std::size_t> entry_index;
    std::optional<std::size_t> exit_index;
};

// Episode handling: Multi allows going flat, re-entering and reversing (the
// default); Single allows one entry and one exit in a single direction.
enum class EpisodeMode { Multi, Single };

// Best strategy with position in {-1,0,+1}, flat start and end. Profit is
// sum(-action_i * price_i * step_value) - cost * sum|action_i|; a reversal
// costs two transactions. Ties prefer fewer transactions, then earlier exit.
// Never negative: doing nothing is admissible.
Strategy mps0(std::span<const long long> prices, const CostModel& cost,
              EpisodeMode mode = EpisodeMode::Multi);

// Contiguous runs of nonzero position, for spectrum plots.
struct ActionSegment {
    std::size_t begin = 0; // tick of the entering action
    std::size_t end = 0;   // tick of the exiting action
    int direction = 0;     // position held in [begin, end)
};
std::vector<ActionSegment> action_segments(const Strategy& s);

struct SweepRow {
    long long cost_cents = 0;
    long long mp_cents = 0;
    long long transactions = 0;
    std::vector<ActionSegment> segments;
};
// costs must be ascending; MP is non-increasing along the sweep.
std::vector<SweepRow> cost_sweep(std::span<const long long> prices,
                                 std::span<const long long> costs_cents,
                                 long long step_value_cents,
                                 EpisodeMode mode = EpisodeMode::Multi);

// MP(0) shortcut: step value times total positive variation of the path.
long long total_variation_cents(std::span<const long long> prices,
                                long long step_value_cents);

struct MpVolumeRow {
    double mp = 0.0; // currency units
    double volume = 0.0;
};
struct MpVolumeTable {
    std::vector<MpVolumeRow> rows;
    moments::OlsFit zero_intercept;
    moments::OlsFit free_intercept;
};
// Per-session MPS0 profit vs session volume, with both regressions.
// Needs >= 3 sessions; degenerate x propagates the ols error.
MpVolumeTable mp_volume_table(
    std::span<const std::pair<std::vector<long long>, double>> sessions,
    const CostModel& cost, EpisodeMode mode = EpisodeMode::Multi);

} // namespace ticklab::mps

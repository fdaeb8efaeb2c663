#pragma once

// Tick data on a price lattice: CSV parsing/serialization, session ranges,
// increment series and limit band rank windows. Prices are held as integer
// lattice indices m = price / delta; timestamps as epoch seconds (the type
// leaves room for finer resolution later).

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ticklab::tickstore {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LatticeSpec {
    double delta = 0.25; // quote units per lattice step

    // price -> lattice index; throws ParseError if price is off-lattice
    // (|price - m*delta| > 1e-6 * delta).
    long long to_index(double price) const;
    double to_price(long long m) const { return static_cast<double>(m) * delta; }
};

struct Tick {
    std::int64_t ts = 0; // epoch seconds
    long long m = 0;     // price lattice index
    std::uint32_t size = 0;
};

// "YYYY-MM-DD HH:MM:SS" <-> epoch seconds (no timezone applied).
std::int64_t parse_timestamp(const std::string& s);
std::string format_timestamp(std::int64_t ts);

struct SessionRange {
    std::string label;   // e.g. "day" or "overnight"
    std::string date;    // YYYY-MM-DD of the session's day
    std::int64_t start = 0, end = 0; // inclusive bounds, epoch seconds
    std::vector<Tick> ticks;

    std::string id() const { return date + " " + label; }
    std::uint64_t volume() const;
};

struct LimitBandSpec {
    double settle = 0.0;
    double limit = 0.0; // max move from settle, quote units
};

struct SessionConfig {
    LatticeSpec lattice;
    struct RangeDef {
        std::string label;
        int start_sec = 0; // seconds after midnight, inclusive
        int end_sec = 0;
    };
    std::vector<RangeDef> ranges;
    std::map<std::string, LimitBandSpec> limits; // keyed by date
};

// Key-value session config, one "key = value" per line, '#' comments.
// Keys: delta, range (label hh:mm:ss hh:mm:ss), limit (date settle width).
SessionConfig parse_session_config(std::istream& in);

struct ParseStats {
    std::uint64_t lines = 0;
    std::uint64_t parsed = 0;        // ticks kept in some range
    std::uint64_t dropped_zero = 0;  // zero-size records
    std::uint64_t dropped_range = 0; // outside all configured ranges
};

// Parse tick CSV ("timestamp,price,size") and split into per-day session
// ranges. Throws ParseError naming the line for malformed records,
// off-lattice prices, or non-monotone timestamps within a range. Zero-size
// and out-of-range records are dropped and counted.
std::vector<SessionRange> parse_ticks(std::istream& in, const SessionConfig& cfg,
                                      ParseStats* stats = nullptr);

// Inverse of parse_ticks for round trips: emits the same CSV layout.
void serialize_ticks(std::ostream& out, const LatticeSpec& lattice,
                     std::span<const SessionRange> ranges);

struct IncrementSet {
    std::vector<long long> a; // waiting times, seconds
    std::vector<long long> b; // price increments, lattice steps
};
// a_i = t_i - t_{i-1}, b_i = m_i - m_{i-1} within one range.
IncrementSet increments(const SessionRange& range);

// Price increments across consecutive ranges: first price of each range
// minus last price of the previous one, with the time gap.
struct CrossIncrement {
    long long c = 0;
    std::int64_t gap_seconds = 0;
};
std::vector<CrossIncrement> cross_increments(std::span<const SessionRange> ranges);

struct LimitBand {
    long long settle_m = 0;
    long long width_steps = 0; // limit / delta

    long long down_m() const { return settle_m - width_steps; }
    long long up_m() const { return settle_m + width_steps; }
};
LimitBand make_band(const LatticeSpec& lattice, const LimitBandSpec& spec);

// Signed rank window [k_min, k_max] reachable from price index m inside the
// band: k_min = down - m <= 0, k_max = up - m >= 0. m strictly outside the
// band throws std::invalid_argument naming the violated side.
std::pair<long long, long long> limit_ranks(const LimitBand& band, long long m);

} // namespace ticklab::tickstore

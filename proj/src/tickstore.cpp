#include "ticklab/tickstore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace ticklab::tickstore {

long long LatticeSpec::to_index(double price) const {
    if (!(delta > 0.0)) throw ParseError("lattice delta must be > 0");
    const double q = price / delta;
    const long long m = std::llround(q);
    if (std::fabs(price - static_cast<double>(m) * delta) > 1e-6 * delta)
        throw ParseError("off-lattice price " + std::to_string(price));
    return m;
}

namespace {

// civil-days arithmetic (Howard Hinnant's algorithms), no timezone involved
long long days_from_civil(long long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

void civil_from_days(long long z, long long& y, unsigned& m, unsigned& d) {
    z += 719468;
    const long long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<long long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

} // namespace

std::int64_t parse_timestamp(const std::string& s) {
    int y = 0;
    unsigned mo = 0, d = 0, hh = 0, mm = 0, ss = 0;
    char tail = 0;
    const int got = std::sscanf(s.c_str(), "%d-%u-%u %u:%u:%u%c", &y, &mo, &d,
                                &hh, &mm, &ss, &tail);
    if (got != 6 || mo < 1 || mo > 12 || d < 1 || d > 31 || hh > 23 || mm > 59 ||
        ss > 59)
        throw ParseError("bad timestamp '" + s + "'");
    return days_from_civil(y, mo, d) * 86400 +
           static_cast<std::int64_t>(hh * 3600 + mm * 60 + ss);
}

std::string format_timestamp(std::int64_t ts) {
    long long days = ts / 86400;
    std::int64_t tod = ts % 86400;
    if (tod < 0) { tod += 86400; --days; }
    long long y;
    unsigned mo, d;
    civil_from_days(days, y, mo, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u %02lld:%02lld:%02lld", y, mo,
                  d, static_cast<long long>(tod / 3600),
                  static_cast<long long>((tod / 60) % 60),
                  static_cast<long long>(tod % 60));
    return buf;
}

std::uint64_t SessionRange::volume() const {
    std::uint64_t v = 0;
    for (const auto& t : ticks) v += t.size;
    return v;
}

namespace {

int parse_tod(const std::string& s) {
    unsigned hh = 0, mm = 0, ss = 0;
    if (std::sscanf(s.c_str(), "%u:%u:%u", &hh, &mm, &ss) != 3 || hh > 23 ||
        mm > 59 || ss > 59)
        throw ParseError("bad time of day '" + s + "'");
    return static_cast<int>(hh * 3600 + mm * 60 + ss);
}

} // namespace

SessionConfig parse_session_config(std::istream& in) {
    SessionConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ParseError("config line " + std::to_string(lineno) +
                                 ": expected key = value");
            continue;
        }
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(val);
        std::istringstream vs(val);
        if (key == "delta") {
            if (!(vs >> cfg.lattice.delta) || !(cfg.lattice.delta > 0))
                throw ParseError("config line " + std::to_string(lineno) +
                                 ": bad delta");
        } else if (key == "range") {
            SessionConfig::RangeDef r;
            std::string start, end;
            if (!(vs >> r.label >> start >> end))
                throw ParseError("config line " + std::to_string(lineno) +
                                 ": range wants 'label start end'");
            r.start_sec = parse_tod(start);
            r.end_sec = parse_tod(end);
            if (r.end_sec < r.start_sec)
                throw ParseError("config line " + std::to_string(lineno) +
                                 ": range ends before it starts");
            cfg.ranges.push_back(r);
        } else if (key == "limit") {
            std::string date;
            LimitBandSpec b;
            if (!(vs >> date >> b.settle >> b.limit) || !(b.limit > 0))
                throw ParseError("config line " + std::to_string(lineno) +
                                 ": limit wants 'date settle width'");
            cfg.limits[date] = b;
        } else {
            throw ParseError("config line " + std::to_string(lineno) +
                             ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

std::vector<SessionRange> parse_ticks(std::istream& in, const SessionConfig& cfg,
                                      ParseStats* stats) {
    std::vector<SessionConfig::RangeDef> ranges = cfg.ranges;
    if (ranges.empty()) ranges.push_back({"all", 0, 86399});

    ParseStats st;
    // (date, range index) -> session, kept sorted for deterministic output
    std::map<std::pair<std::string, std::size_t>, SessionRange> sessions;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        ++st.lines;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
            --st.lines;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) +
                             ": expected 'timestamp,price,size'");
        std::int64_t ts;
        try {
            ts = parse_timestamp(line.substr(0, c1));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        double price;
        long long size;
        try {
            price = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
            size = std::stoll(line.substr(c2 + 1));
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(lineno) + ": bad number");
        }
        if (size < 0)
            throw ParseError("line " + std::to_string(lineno) + ": negative size");
        if (size == 0) {
            ++st.dropped_zero;
            continue;
        }
        long long m;
        try {
            m = cfg.lattice.to_index(price);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }

        const int tod = static_cast<int>(((ts % 86400) + 86400) % 86400);
        std::size_t ri = ranges.size();
        for (std::size_t i = 0; i < ranges.size(); ++i)
            if (tod >= ranges[i].start_sec && tod <= ranges[i].end_sec) {
                ri = i;
                break;
            }
        if (ri == ranges.size()) {
            ++st.dropped_range;
            continue;
        }

        const std::string date = format_timestamp(ts).substr(0, 10);
        auto& sess = sessions[{date, ri}];
        if (sess.ticks.empty()) {
            sess.label = ranges[ri].label;
            sess.date = date;
            const std::int64_t midnight = ts - tod;
            sess.start = midnight + ranges[ri].start_sec;
            sess.end = midnight + ranges[ri].end_sec;
        } else if (ts < sess.ticks.back().ts) {
            throw ParseError("line " + std::to_string(lineno) +
                             ": non-monotone timestamp in range '" + sess.label +
                             "' on " + date);
        }
        sess.ticks.push_back({ts, m, static_cast<std::uint32_t>(size)});
        ++st.parsed;
    }

    std::vector<SessionRange> out;
    out.reserve(sessions.size());
    for (auto& [key, sess] : sessions) out.push_back(std::move(sess));
    if (stats) *stats = st;
    return out;
}

namespace {

std::string format_price(double price) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", price);
    std::string s = buf;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

} // namespace

void serialize_ticks(std::ostream& out, const LatticeSpec& lattice,
                     std::span<const SessionRange> ranges) {
    for (const auto& r : ranges)
        for (const auto& t : r.ticks)
            out << format_timestamp(t.ts) << ','
                << format_price(lattice.to_price(t.m)) << ',' << t.size << '\n';
}

IncrementSet increments(const SessionRange& range) {
    IncrementSet inc;
    const auto& t = range.ticks;
    if (t.size() < 2) return inc;
    inc.a.reserve(t.size() - 1);
    inc.b.reserve(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) {
        inc.a.push_back(t[i].ts - t[i - 1].ts);
        inc.b.push_back(t[i].m - t[i - 1].m);
    }
    return inc;
}

std::vector<CrossIncrement> cross_increments(std::span<const SessionRange> ranges) {
    std::vector<CrossIncrement> out;
    for (std::size_t i = 1; i < ranges.size(); ++i) {
        if (ranges[i - 1].ticks.empty() || ranges[i].ticks.empty()) continue;
        const auto& prev = ranges[i - 1].ticks.back();
        const auto& next = ranges[i].ticks.front();
        out.push_back({next.m - prev.m, next.ts - prev.ts});
    }
    return out;
}

LimitBand make_band(const LatticeSpec& lattice, const LimitBandSpec& spec) {
    LimitBand b;
    b.settle_m = lattice.to_index(spec.settle);
    const double steps = spec.limit / lattice.delta;
    b.width_steps = std::llround(steps);
    if (std::fabs(steps - static_cast<double>(b.width_steps)) > 1e-6 ||
        b.width_steps <= 0)
        throw ParseError("limit width is not a whole number of lattice steps");
    return b;
}

std::pair<long long, long long> limit_ranks(const LimitBand& band, long long m) {
    if (m < band.down_m())
        throw std::invalid_argument("limit_ranks: price below the down limit");
    if (m > band.up_m())
        throw std::invalid_argument("limit_ranks: price above the up limit");
    return {band.down_m() - m, band.up_m() - m};
}

} // namespace ticklab::tickstore

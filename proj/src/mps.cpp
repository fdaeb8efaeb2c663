#include "ticklab/mps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ticklab::mps {

CostModel CostModel::from_dollars(double cost, double step_value) {
    auto to_cents = [](double d, const char* what) {
        const long long c = std::llround(d * 100.0);
        if (std::fabs(d * 100.0 - static_cast<double>(c)) > 1e-6)
            throw std::invalid_argument(std::string(what) +
                                        " is not a whole number of cents");
        return c;
    };
    CostModel m;
    m.cost_cents = to_cents(cost, "transaction cost");
    m.step_value_cents = to_cents(step_value, "step value");
    if (m.cost_cents < 0) throw std::invalid_argument("cost must be >= 0");
    if (m.step_value_cents <= 0)
        throw std::invalid_argument("step value must be > 0");
    return m;
}

namespace {

constexpr long long kNegInf = std::numeric_limits<long long>::min() / 4;

// DP value with the tie-break baked into the ordering: more profit, then
// fewer transactions, then earlier last action.
struct Key {
    long long profit = kNegInf;
    long long tx = 0;
    long long last = -1;

    bool feasible() const { return profit > kNegInf; }
};

bool better(const Key& a, const Key& b) {
    if (a.profit != b.profit) return a.profit > b.profit;
    if (a.tx != b.tx) return a.tx < b.tx;
    return a.last < b.last;
}

Key step(const Key& from, int action, long long price, std::size_t i,
         const CostModel& cost) {
    Key k = from;
    if (action != 0) {
        k.profit -= static_cast<long long>(action) * price * cost.step_value_cents;
        k.profit -= cost.cost_cents * std::abs(action);
        k.tx += std::abs(action);
        k.last = static_cast<long long>(i);
    }
    return k;
}

Strategy finish(std::vector<int> actions, const CostModel& cost,
                std::span<const long long> prices) {
    Strategy s;
    s.actions = std::move(actions);
    for (std::size_t i = 0; i < s.actions.size(); ++i) {
        const int a = s.actions[i];
        if (a == 0) continue;
        s.mp_cents -= static_cast<long long>(a) * prices[i] * cost.step_value_cents;
        s.mp_cents -= cost.cost_cents * std::abs(a);
        s.transactions += std::abs(a);
        if (!s.entry_index) s.entry_index = i;
        s.exit_index = i;
    }
    return s;
}

Strategy solve_multi(std::span<const long long> prices, const CostModel& cost) {
    const std::size_t n = prices.size();
    // states: position -1, 0, +1 -> index 0, 1, 2
    std::array<Key, 3> cur;
    cur[1] = Key{0, 0, -1};
    std::vector<std::array<int, 3>> parent(n); // previous state index

    for (std::size_t i = 0; i < n; ++i) {
        std::array<Key, 3> nxt;
        std::array<int, 3> par{-1, -1, -1};
        for (int sp = 0; sp < 3; ++sp) {
            for (int s = 0; s < 3; ++s) {
                if (!cur[s].feasible()) continue;
                const int action = sp - s;
                const Key k = step(cur[s], action, prices[i], i, cost);
                if (!nxt[sp].feasible() || better(k, nxt[sp])) {
                    nxt[sp] = k;
                    par[sp] = s;
                }
            }
        }
        cur = nxt;
        parent[i] = par;
    }

    std::vector<int> actions(n, 0);
    int s = 1; // must end flat
    for (std::size_t i = n; i-- > 0;) {
        const int prev = parent[i][s];
        actions[i] = s - prev;
        s = prev;
    }
    return finish(std::move(actions), cost, prices);
}

Strategy solve_single(std::span<const long long> prices, const CostModel& cost) {
    const std::size_t n = prices.size();
    // states: 0 flat-pre, 1 long, 2 short, 3 flat-post
    constexpr int kPos[4] = {0, 1, -1, 0};
    std::array<Key, 4> cur;
    cur[0] = Key{0, 0, -1};
    std::vector<std::array<int, 4>> parent(n);

    auto allowed = [](int s, int sp) {
        switch (s) {
            case 0: return sp == 0 || sp == 1 || sp == 2;
            case 1: return sp == 1 || sp == 3; // no in-episode reversal
            case 2: return sp == 2 || sp == 3;
            default: return sp == 3;
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        std::array<Key, 4> nxt;
        std::array<int, 4> par{-1, -1, -1, -1};
        for (int sp = 0; sp < 4; ++sp) {
            for (int s = 0; s < 4; ++s) {
                if (!cur[s].feasible() || !allowed(s, sp)) continue;
                const int action = kPos[sp] - kPos[s];
                // distinguish flat-pre from flat-post even with action 0
                const Key k = step(cur[s], action, prices[i], i, cost);
                if (!nxt[sp].feasible() || better(k, nxt[sp])) {
                    nxt[sp] = k;
                    par[sp] = s;
                }
            }
        }
        cur = nxt;
        parent[i] = par;
    }

    int end = 0;
    if (cur[3].feasible() && better(cur[3], cur[0])) end = 3;
    std::vector<int> actions(n, 0);
    int s = end;
    for (std::size_t i = n; i-- > 0;) {
        const int prev = parent[i][s];
        actions[i] = kPos[s] - kPos[prev];
        s = prev;
    }
    return finish(std::move(actions), cost, prices);
}

} // namespace

Strategy mps0(std::span<const long long> prices, const CostModel& cost,
              EpisodeMode mode) {
    if (prices.empty()) throw std::invalid_argument("mps0: need >= 1 tick");
    if (cost.cost_cents < 0 || cost.step_value_cents <= 0)
        throw std::invalid_argument("mps0: invalid cost model");
    return mode == EpisodeMode::Multi ? solve_multi(prices, cost)
                                      : solve_single(prices, cost);
}

std::vector<ActionSegment> action_segments(const Strategy& s) {
    std::vector<ActionSegment> out;
    int pos = 0;
    for (std::size_t i = 0; i < s.actions.size(); ++i) {
        const int next = pos + s.actions[i];
        if (next != pos) {
            if (pos != 0) out.back().end = i; // leaving (or flipping) a run
            if (next != 0) out.push_back({i, i, next});
        }
        pos = next;
    }
    return out;
}

std::vector<SweepRow> cost_sweep(std::span<const long long> prices,
                                 std::span<const long long> costs_cents,
                                 long long step_value_cents, EpisodeMode mode) {
    for (std::size_t i = 1; i < costs_cents.size(); ++i)
        if (costs_cents[i] < costs_cents[i - 1])
            throw std::invalid_argument("cost_sweep: costs must be ascending");
    std::vector<SweepRow> rows;
    for (long long c : costs_cents) {
        const Strategy s = mps0(prices, {c, step_value_cents}, mode);
        rows.push_back({c, s.mp_cents, s.transactions, action_segments(s)});
    }
    return rows;
}

long long total_variation_cents(std::span<const long long> prices,
                                long long step_value_cents) {
    long long tv = 0;
    for (std::size_t i = 1; i < prices.size(); ++i)
        tv += std::llabs(prices[i] - prices[i - 1]);
    return tv * step_value_cents;
}

MpVolumeTable mp_volume_table(
    std::span<const std::pair<std::vector<long long>, double>> sessions,
    const CostModel& cost, EpisodeMode mode) {
    if (sessions.size() < 3)
        throw std::invalid_argument("mp_volume_table: need >= 3 sessions");
    MpVolumeTable t;
    std::vector<double> x, y;
    for (const auto& [prices, volume] : sessions) {
        const Strategy s = mps0(prices, cost, mode);
        const double mp = static_cast<double>(s.mp_cents) / 100.0;
        t.rows.push_back({mp, volume});
        x.push_back(mp);
        y.push_back(volume);
    }
    t.zero_intercept = moments::ols(x, y, true);
    t.free_intercept = moments::ols(x, y, false);
    return t;
}

} // namespace ticklab::mps

#pragma once

// Independent reference computations for tests. Nothing here calls into the
// pipeline code it is used to check.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

// ---- swap_cups over abstract states ----------------------------------------

// Cup locations: 0, 1, 2 are the first cup's plate, the other cup's plate
// and the empty plate; 3 is the gripper.
struct SwapState {
    int first = 0;
    int other = 1;
    bool started = false;  // some cup has been picked
    auto key() const { return std::tuple(first, other, started); }
    bool operator<(const SwapState& o) const { return key() < o.key(); }
};

struct SwapMove {
    std::string verb;  // "pick" or "put"
    std::string cup;   // "first" or "other"
    int plate = -1;    // put only
    bool operator==(const SwapMove&) const = default;
};

/// Shortest pick/put sequence that swaps the cups, one cup per plate,
/// moving the first cup first. Breadth-first over all abstract states.
inline std::vector<SwapMove> swap_shortest_plan() {
    const SwapState start{0, 1, false};
    auto goal = [](const SwapState& s) { return s.first == 1 && s.other == 0; };
    std::map<SwapState, std::pair<SwapState, SwapMove>> parent;
    std::set<SwapState> seen{start};
    std::deque<SwapState> q{start};
    std::optional<SwapState> end;
    while (!q.empty()) {
        const SwapState s = q.front();
        q.pop_front();
        if (goal(s)) {
            end = s;
            break;
        }
        std::vector<std::pair<SwapState, SwapMove>> next;
        const bool hand_free = s.first != 3 && s.other != 3;
        if (hand_free) {
            next.push_back({{3, s.other, true}, {"pick", "first", -1}});
            if (s.started) next.push_back({{s.first, 3, true}, {"pick", "other", -1}});
        } else {
            for (int p = 0; p < 3; ++p) {
                if (s.first == p || s.other == p) continue;
                if (s.first == 3) next.push_back({{p, s.other, true}, {"put", "first", p}});
                if (s.other == 3) next.push_back({{s.first, p, true}, {"put", "other", p}});
            }
        }
        for (const auto& [n, m] : next) {
            if (seen.count(n)) continue;
            seen.insert(n);
            parent[n] = {s, m};
            q.push_back(n);
        }
    }
    std::vector<SwapMove> path;
    if (!end) return path;
    for (SwapState s = *end; parent.count(s); s = parent[s].first) path.push_back(parent[s].second);
    std::reverse(path.begin(), path.end());
    return path;
}

/// Number of shortest plans (to confirm the plan is forced).
inline int swap_shortest_plan_count() {
    // Enumerate all action sequences of the shortest length by depth-first search.
    const int len = static_cast<int>(swap_shortest_plan().size());
    int count = 0;
    auto rec = [&](auto&& self, SwapState s, int depth) -> void {
        if (depth == len) {
            if (s.first == 1 && s.other == 0) ++count;
            return;
        }
        const bool hand_free = s.first != 3 && s.other != 3;
        if (hand_free) {
            self(self, SwapState{3, s.other, true}, depth + 1);
            if (s.started) self(self, SwapState{s.first, 3, true}, depth + 1);
        } else {
            for (int p = 0; p < 3; ++p) {
                if (s.first == p || s.other == p) continue;
                if (s.first == 3) self(self, SwapState{p, s.other, true}, depth + 1);
                if (s.other == 3) self(self, SwapState{s.first, p, true}, depth + 1);
            }
        }
    };
    rec(rec, SwapState{0, 1, false}, 0);
    return count;
}

// ---- assignment ------------------------------------------------------------

/// Largest matching with least total cost, by trying every permutation.
/// cost[i][j] for i in the first set, j in the second.
inline std::vector<std::pair<std::size_t, std::size_t>> brute_force_assignment(
    const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    const std::size_t m = n ? cost[0].size() : 0;
    std::vector<std::pair<std::size_t, std::size_t>> best;
    if (n == 0 || m == 0) return best;
    const bool rows_fewer = n <= m;
    const std::size_t k = rows_fewer ? n : m;   // matching size
    const std::size_t big = rows_fewer ? m : n;
    std::vector<std::size_t> perm(big);
    for (std::size_t i = 0; i < big; ++i) perm[i] = i;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double c = 0;
        for (std::size_t i = 0; i < k; ++i) c += rows_fewer ? cost[i][perm[i]] : cost[perm[i]][i];
        if (c < best_cost - 1e-12) {
            best_cost = c;
            best.clear();
            for (std::size_t i = 0; i < k; ++i)
                best.emplace_back(rows_fewer ? i : perm[i], rows_fewer ? perm[i] : i);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::sort(best.begin(), best.end());
    return best;
}

// ---- statistics --------------------------------------------------------------

/// Normal-approximation binomial interval half-width at ~99.7% (3 sigma).
inline double binomial_halfwidth(double p, int n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

}  // namespace oracle

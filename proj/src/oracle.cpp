#include "mtvrp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtvrp::oracle {

namespace {

std::vector<double> grid_times(const LinearArc& a, int resolution) {
    if (a.end_time <= a.start_time) return {a.start_time};
    std::vector<double> t(static_cast<std::size_t>(resolution) + 1);
    for (int i = 0; i <= resolution; ++i) {
        t[i] = i == resolution ? a.end_time
                               : a.start_time + (a.end_time - a.start_time) * i / resolution;
    }
    return t;
}

double grid_step(const LinearArc& a, int resolution) {
    return a.end_time <= a.start_time ? 0.0 : (a.end_time - a.start_time) / resolution;
}

// Shortest path over the time grids; `slack(k)` is added to the speed
// allowance of leg k and time may run backwards by at most that much.
template <class Slack>
double layered_shortest_path(std::span<const LinearArc> nodes, double v_max, int resolution,
                             Slack slack) {
    std::vector<double> prev_t = grid_times(nodes[0], resolution);
    std::vector<double> prev_c(prev_t.size(), 0.0);
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        const std::vector<double> cur_t = grid_times(nodes[k], resolution);
        std::vector<double> cur_c(cur_t.size(), kInf);
        const double sl = slack(k);
        for (std::size_t j = 0; j < cur_t.size(); ++j) {
            const Vec2 q = nodes[k].position(cur_t[j]);
            for (std::size_t i = 0; i < prev_t.size(); ++i) {
                if (!(prev_c[i] < kInf)) continue;
                const double d = norm(q - nodes[k - 1].position(prev_t[i]));
                if (d <= v_max * (cur_t[j] - prev_t[i]) + sl) {
                    cur_c[j] = std::min(cur_c[j], prev_c[i] + d);
                }
            }
        }
        prev_t = std::move(cur_t);
        prev_c = std::move(cur_c);
    }
    return *std::min_element(prev_c.begin(), prev_c.end());
}

}  // namespace

GridBracket grid_tour_cost(std::span<const LinearArc> nodes, double v_max, int resolution) {
    GridBracket out;
    if (nodes.empty()) return {0.0, 0.0};
    out.upper = layered_shortest_path(nodes, v_max, resolution, [](std::size_t) { return 0.0; });

    // Rounding each optimal time to its nearest grid point moves the positions
    // by at most |V| h / 2 and the times by h / 2.
    std::vector<double> h(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) h[k] = grid_step(nodes[k], resolution);
    auto move = [&](std::size_t k) { return nodes[k].speed() * h[k]; };
    const double relaxed = layered_shortest_path(nodes, v_max, resolution, [&](std::size_t k) {
        return 0.5 * ((v_max * h[k] + move(k)) + (v_max * h[k - 1] + move(k - 1)));
    });
    double rounding = 0.0;
    for (std::size_t k = 1; k < nodes.size(); ++k) rounding += 0.5 * (move(k) + move(k - 1));
    out.lower = relaxed < kInf ? std::max(0.0, relaxed - rounding) : kInf;
    return out;
}

GridTime grid_earliest_arrival(const SpaceTimePoint& origin, const LinearArc& arc, double v_max,
                               int resolution) {
    const double lo = std::max(arc.start_time, origin.time);
    if (lo > arc.end_time) return {};
    const LinearArc part = arc.restricted(lo, arc.end_time);
    for (double t : grid_times(part, resolution)) {
        if (norm(part.position(t) - origin.position) <= v_max * (t - origin.time)) {
            return {t, grid_step(part, resolution)};
        }
    }
    return {};
}

GridTime grid_latest_departure(const LinearArc& from, const LinearArc& to, double v_max,
                               int resolution) {
    // A departure works iff the final point of `to` is reachable from it.
    const Vec2 goal = to.position(to.end_time);
    const auto times = grid_times(from, resolution);
    for (auto it = times.rbegin(); it != times.rend(); ++it) {
        const double t = *it;
        if (t <= to.end_time && norm(goal - from.position(t)) <= v_max * (to.end_time - t)) {
            return {t, grid_step(from, resolution)};
        }
    }
    return {-kInf, grid_step(from, resolution)};
}

std::vector<TourRecord> best_tour_per_subset(const TwGraph& g, const EdgeSet& banned,
                                             bool with_costs, long* enumerated) {
    const int n = g.instance().n_targets();
    if (n > kMaxTargets) throw std::invalid_argument("oracle: too many targets");
    std::vector<TourRecord> best(static_cast<std::size_t>(1) << n);
    const double cap = g.instance().capacity;
    long count = 0;

    PartialTour seq{TwGraph::kDepot};
    std::vector<LinearArc> arcs{g.tw(TwGraph::kDepot).arc.restricted(0.0, 0.0)};
    std::vector<double> times{0.0};

    auto recurse = [&](auto&& self, unsigned mask, double load) -> void {
        const int last = seq.back();
        if (mask != 0 && !banned.contains(last, TwGraph::kDepot)) {
            ++count;
            seq.push_back(TwGraph::kDepot);
            TourRecord& slot = best[mask];
            if (with_costs) {
                const double c = tour_cost(g, seq).cost;
                if (c < slot.cost) slot = {seq, c};
            } else if (slot.sequence.empty()) {
                slot = {seq, 0.0};
            }
            seq.pop_back();
        }
        for (int w = 1; w < g.n_tw(); ++w) {
            const int target = g.tw(w).target;
            if (mask & (1u << (target - 1))) continue;
            if (load + g.demand(w) > cap) continue;
            if (banned.contains(last, w)) continue;
            const LinearArc& prev = arcs.back();
            const double t = earliest_arrival({prev.position(times.back()), times.back()},
                                              g.tw(w).arc, g.v_max());
            if (!(t < kInf)) continue;
            seq.push_back(w);
            arcs.push_back(g.tw(w).arc);
            times.push_back(t);
            self(self, mask | (1u << (target - 1)), load + g.demand(w));
            seq.pop_back();
            arcs.pop_back();
            times.pop_back();
        }
    };
    recurse(recurse, 0u, 0.0);
    if (enumerated) *enumerated = count;
    return best;
}

namespace {

// Cheapest way to cover `full` with at most k disjoint subsets from `best`.
OptimumResult partition(const TwGraph& g, const std::vector<TourRecord>& best) {
    const int n = g.instance().n_targets();
    const unsigned full = (1u << n) - 1u;
    const std::size_t size = static_cast<std::size_t>(full) + 1;
    OptimumResult out;
    if (n == 0) {
        out.cost = 0.0;
        return out;
    }
    // dp[mask] for the current number of tours; choice records the last tour.
    std::vector<double> dp(size, kInf);
    dp[0] = 0.0;
    std::vector<std::vector<unsigned>> choice;
    for (int k = 0; k < g.instance().n_agents; ++k) {
        std::vector<double> next = dp;
        std::vector<unsigned> pick(size, 0u);
        for (unsigned mask = 1; mask <= full; ++mask) {
            // The tour containing the lowest set target is chosen last, which
            // fixes an order among the disjoint tours.
            const unsigned low = mask & (~mask + 1u);
            for (unsigned sub = mask; sub; sub = (sub - 1) & mask) {
                if (!(sub & low)) continue;
                const TourRecord& t = best[sub];
                if (t.sequence.empty() || !(dp[mask ^ sub] < kInf)) continue;
                const double c = dp[mask ^ sub] + t.cost;
                if (c < next[mask]) {
                    next[mask] = c;
                    pick[mask] = sub;
                }
            }
        }
        choice.push_back(std::move(pick));
        dp = std::move(next);
    }
    if (!(dp[full] < kInf)) return out;
    out.cost = dp[full];
    // Walk back through the layers: a zero pick means the layer kept the
    // previous value.
    unsigned mask = full;
    for (int k = static_cast<int>(choice.size()) - 1; k >= 0 && mask; --k) {
        const unsigned sub = choice[k][mask];
        if (!sub) continue;
        out.tours.push_back(best[sub]);
        mask ^= sub;
    }
    std::reverse(out.tours.begin(), out.tours.end());
    return out;
}

}  // namespace

OptimumResult exhaustive_optimum(const TwGraph& g, const EdgeSet& banned) {
    long count = 0;
    const auto best = best_tour_per_subset(g, banned, true, &count);
    OptimumResult out = partition(g, best);
    out.enumerated = count;
    return out;
}

OptimumResult exhaustive_optimum(const TwGraph& g) {
    return exhaustive_optimum(g, EdgeSet(g.n_tw()));
}

bool exhaustive_feasible(const TwGraph& g, const EdgeSet& banned) {
    return partition(g, best_tour_per_subset(g, banned, false)).cost < kInf;
}

}  // namespace mtvrp::oracle

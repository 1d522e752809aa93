#include "mtvrp/pricing.hpp"

#include <algorithm>
#include <deque>
#include <queue>

#include <nlohmann/json.hpp>

namespace mtvrp {

namespace {

constexpr double kLoadTol = 1e-9;

bool fits(double load, double demand, double capacity) { return load + demand <= capacity + kLoadTol; }

struct QueueEntry {
    double t;
    double load;
    double min_lb;
    long seq;
    int index;

    bool operator>(const QueueEntry& o) const {
        if (t != o.t) return t > o.t;
        if (load != o.load) return load > o.load;
        if (min_lb != o.min_lb) return min_lb > o.min_lb;
        return seq > o.seq;
    }
};

}  // namespace

double Label::min_lb() const {
    double m = kInf;
    for (double v : g_lb) m = std::min(m, v);
    return m;
}

bool dominates(const TwGraph& g, const Label& l, const Label& l2) {
    if (l.tw == TwGraph::kDepot) return l.exact_reduced <= l2.exact_reduced;
    if (l.load > l2.load) return false;
    if ((l.blocked & ~l2.blocked).any()) return false;
    const TargetWindow& w = g.tw(l.tw);
    for (int k = 0; k < w.n_segments(); ++k) {
        const double rhs = l2.g_lb[static_cast<std::size_t>(k)];
        if (rhs == kInf) continue;
        const double ub = l.g_ub[static_cast<std::size_t>(k)];
        if (ub == kInf) return false;
        if (ub + g.segment(w.seg_begin + k).spatial_length - l.lambda > rhs - l2.lambda) return false;
    }
    return true;
}

std::optional<double> PricingResult::min_reduced_cost() const {
    if (tours.empty()) return std::nullopt;
    double m = kInf;
    for (const PricedTour& p : tours) m = std::min(m, p.reduced_cost);
    return m;
}

Label PricingSolver::root(const Duals& duals) const {
    Label l;
    l.g_ub = {0.0};
    l.g_lb = {0.0};
    l.lambda = duals.fleet;
    return l;
}

std::vector<int> PricingSolver::successor_windows(const Label& l, const EdgeSet& banned) const {
    const Instance& inst = g_.instance();
    std::vector<int> out;
    for (int tw = 0; tw < g_.n_tw(); ++tw) {
        if (!g_.has_edge(l.tw, tw) || banned.contains(l.tw, tw)) continue;
        if (l.t > g_.lfdt(l.tw, tw) + kLatestDepartureTol) continue;
        const int target = g_.tw(tw).target;
        if (target != 0) {
            if (!fits(l.load, g_.demand(tw), inst.capacity)) continue;
            if (l.blocked.test(static_cast<std::size_t>(target - 1))) continue;
        }
        out.push_back(tw);
    }
    return out;
}

std::optional<Label> PricingSolver::extend(const Label& l, int tw, const Duals& duals) const {
    const TargetWindow& from = g_.tw(l.tw);
    const TargetWindow& to = g_.tw(tw);
    const double t = g_.efat({from.arc.position(l.t), l.t}, tw);
    if (t == kInf) return std::nullopt;

    Label n;
    n.tw = tw;
    n.t = t;
    n.load = l.load + g_.demand(tw);
    n.blocked = l.blocked;
    n.lambda = l.lambda + duals.target(to.target);
    if (to.target != 0) {
        n.blocked.set(static_cast<std::size_t>(to.target - 1));
        const Instance& inst = g_.instance();
        for (int i = 1; i <= inst.n_targets(); ++i) {
            const auto bit = static_cast<std::size_t>(i - 1);
            if (n.blocked.test(bit)) continue;
            if (!fits(n.load, inst.target(i).demand, inst.capacity) ||
                t > g_.max_lfdt(tw, i) + kLatestDepartureTol) {
                n.blocked.set(bit);
            }
        }
    }

    const int n_seg = to.n_segments();
    n.g_ub.assign(static_cast<std::size_t>(n_seg), kInf);
    n.g_lb.assign(static_cast<std::size_t>(n_seg), kInf);
    for (int k2 = 0; k2 < n_seg; ++k2) {
        const int s2 = to.seg_begin + k2;
        double ub = kInf;
        double lb = kInf;
        const bool reachable = t <= g_.segment(s2).t1;
        for (int k = 0; k < from.n_segments(); ++k) {
            const int s = from.seg_begin + k;
            const double gu = l.g_ub[static_cast<std::size_t>(k)];
            if (gu < kInf) ub = std::min(ub, gu + g_.c_start(s, s2));
            const double gl = l.g_lb[static_cast<std::size_t>(k)];
            if (reachable && gl < kInf) lb = std::min(lb, gl + g_.c_seg(s, s2));
        }
        n.g_ub[static_cast<std::size_t>(k2)] = ub;
        n.g_lb[static_cast<std::size_t>(k2)] = lb;
    }
    return n;
}

PricingResult PricingSolver::solve(const Duals& duals, const EdgeSet& banned,
                                   const PricingOptions& opts) const {
    PricingResult result;
    PricingStats& st = result.stats;
    const bool heuristic = opts.mode == PricingMode::Heuristic;

    std::deque<Label> labels;
    std::vector<char> stored;
    std::vector<std::vector<int>> store(static_cast<std::size_t>(g_.n_tw()));
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;

    auto partial_tour = [&](int index) {
        PartialTour seq;
        for (int i = index; i >= 0; i = labels[static_cast<std::size_t>(i)].parent) {
            seq.push_back(labels[static_cast<std::size_t>(i)].tw);
        }
        std::reverse(seq.begin(), seq.end());
        return seq;
    };
    auto erase_from_store = [&](int tw, int index) {
        auto& v = store[static_cast<std::size_t>(tw)];
        v.erase(std::find(v.begin(), v.end(), index));
        stored[static_cast<std::size_t>(index)] = 0;
        ++st.removed_dominated;
    };

    labels.push_back(root(duals));
    stored.push_back(1);
    queue.push({0.0, 0.0, 0.0, 0, 0});
    long seq = 0;
    double best_reduced = kInf;

    while (!queue.empty()) {
        const QueueEntry top = queue.top();
        queue.pop();
        ++st.pops;
        if (opts.deadline && (st.pops & 255) == 0 && std::chrono::steady_clock::now() > *opts.deadline)
            throw DeadlineExceeded("pricing deadline passed");
        if (!stored[static_cast<std::size_t>(top.index)]) {
            ++st.skipped_stale;
            continue;
        }
        const Label& l = labels[static_cast<std::size_t>(top.index)];
        for (int tw : successor_windows(l, banned)) {
            std::optional<Label> next = extend(l, tw, duals);
            if (!next) continue;
            Label& n = *next;
            n.parent = top.index;
            n.seq = ++seq;
            if (++st.created > opts.label_cap)
                throw LabelCapExceeded("pricing label cap of " + std::to_string(opts.label_cap) + " exceeded");
            const bool at_depot = tw == TwGraph::kDepot;
            PartialTour tour;
            if (opts.on_label || at_depot) {
                tour = partial_tour(top.index);
                tour.push_back(tw);
            }
            if (opts.on_label) opts.on_label(n, tour);

            if (at_depot) {
                const double bound = n.g_lb[0] - n.lambda;
                if (best_reduced <= bound) {
                    ++st.pruned_depot_best;
                    continue;
                }
                if (bound >= -opts.epsilon) {
                    ++st.pruned_depot_bound;
                    continue;
                }
                ++st.exact_evaluations;
                n.exact_cost = tour_cost(g_, tour).cost;
                n.exact_reduced = n.exact_cost - n.lambda;
                if (n.exact_reduced >= -opts.epsilon) {
                    ++st.pruned_depot_exact;
                    continue;
                }
            }

            auto& bucket = store[static_cast<std::size_t>(tw)];
            if (opts.dominance) {
                if (heuristic && !at_depot) {
                    if (!bucket.empty() &&
                        labels[static_cast<std::size_t>(bucket.front())].min_lb() <= n.min_lb()) {
                        ++st.pruned_dominated;
                        continue;
                    }
                    if (!bucket.empty()) erase_from_store(tw, bucket.front());
                } else {
                    const bool dominated = std::any_of(bucket.begin(), bucket.end(), [&](int i) {
                        return dominates(g_, labels[static_cast<std::size_t>(i)], n);
                    });
                    if (dominated) {
                        ++st.pruned_dominated;
                        continue;
                    }
                    std::vector<int> beaten;
                    for (int i : bucket) {
                        if (dominates(g_, n, labels[static_cast<std::size_t>(i)])) beaten.push_back(i);
                    }
                    for (int i : beaten) erase_from_store(tw, i);
                }
            }

            const int index = static_cast<int>(labels.size());
            labels.push_back(std::move(n));
            stored.push_back(1);
            bucket.push_back(index);
            st.max_store = std::max(st.max_store, bucket.size());
            const Label& added = labels.back();
            if (!at_depot) {
                queue.push({added.t, added.load, added.min_lb(), added.seq, index});
            } else {
                best_reduced = std::min(best_reduced, added.exact_reduced);
                result.tours.push_back({make_tour(g_, std::move(tour), added.exact_cost), added.exact_reduced});
            }
        }
    }

    if (opts.trace) {
        nlohmann::json rec = {{"mode", heuristic ? "heuristic" : "exact"},
                              {"pops", st.pops},
                              {"created", st.created},
                              {"skipped_stale", st.skipped_stale},
                              {"pruned_depot_best", st.pruned_depot_best},
                              {"pruned_depot_bound", st.pruned_depot_bound},
                              {"pruned_depot_exact", st.pruned_depot_exact},
                              {"pruned_dominated", st.pruned_dominated},
                              {"removed_dominated", st.removed_dominated},
                              {"exact_evaluations", st.exact_evaluations},
                              {"max_store", st.max_store},
                              {"tours", result.tours.size()}};
        *opts.trace << rec.dump() << '\n';
    }
    return result;
}

PricingResult PricingSolver::solve_with_fallback(const Duals& duals, const EdgeSet& banned,
                                                 PricingOptions opts) const {
    opts.mode = PricingMode::Heuristic;
    PricingResult r = solve(duals, banned, opts);
    if (!r.tours.empty()) return r;
    opts.mode = PricingMode::Exact;
    return solve(duals, banned, opts);
}

}  // namespace mtvrp

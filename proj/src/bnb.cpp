#include "mtvrp/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <nlohmann/json.hpp>

#include "mtvrp/feasgen.hpp"
#include "mtvrp/pricing.hpp"

namespace mtvrp {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kPruneTol = 1e-9;

struct Node {
    EdgeSet banned;
    double lower_bound = -kInf;
    int depth = 0;
};

struct Incumbent {
    std::vector<PartialTour> tours;
    double cost = kInf;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Drops repeated visits so every target is covered once; costs are
// recomputed for the shortened tours.
Incumbent exact_cover(const TwGraph& g, const ColumnPool& pool, const std::vector<int>& chosen) {
    Incumbent inc;
    inc.cost = 0.0;
    TargetSet covered;
    for (int i : chosen) {
        const Tour& t = pool[i];
        if ((t.visited & covered).none()) {
            inc.tours.push_back(t.sequence);
            inc.cost += t.cost;
            covered |= t.visited;
            continue;
        }
        PartialTour seq;
        for (int tw : t.sequence) {
            const int target = g.tw(tw).target;
            if (target != 0 && covered.test(static_cast<std::size_t>(target - 1))) continue;
            seq.push_back(tw);
        }
        covered |= t.visited;
        if (seq.size() <= 2) continue;
        inc.cost += tour_cost(g, seq).cost;
        inc.tours.push_back(std::move(seq));
    }
    return inc;
}

double total_cost(const TwGraph& g, const std::vector<PartialTour>& tours) {
    double c = 0.0;
    for (const auto& t : tours) c += tour_cost(g, t).cost;
    return c;
}

class LimitHit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::LimitHit: return "limit";
    }
    return "unknown";
}

std::vector<Edge> mandate_bans(const TwGraph& g, Edge e) {
    const auto [a, b] = e;
    EdgeSet out(g.n_tw());
    auto ban_touching = [&](int w) {
        for (int x = 0; x < g.n_tw(); ++x) {
            if (g.has_edge(w, x)) out.insert(w, x);
            if (g.has_edge(x, w)) out.insert(x, w);
        }
    };
    if (a != TwGraph::kDepot) {
        for (int x = 0; x < g.n_tw(); ++x) {
            if (x != b && g.has_edge(a, x)) out.insert(a, x);
        }
        for (int w : g.windows_of(g.tw(a).target)) {
            if (w != a) ban_touching(w);
        }
    }
    if (b != TwGraph::kDepot) {
        for (int x = 0; x < g.n_tw(); ++x) {
            if (x != a && g.has_edge(x, b)) out.insert(x, b);
        }
        for (int w : g.windows_of(g.tw(b).target)) {
            if (w != b) ban_touching(w);
        }
    }
    return out.edges();
}

std::optional<Edge> select_branch_edge(const std::map<Edge, double>& flows, double tol) {
    std::optional<Edge> inner, depot;
    double inner_flow = kInf, depot_flow = kInf;
    for (const auto& [e, f] : flows) {
        if (f < tol || f > 1.0 - tol) continue;
        const bool at_depot = e.first == TwGraph::kDepot || e.second == TwGraph::kDepot;
        if (!at_depot && f < inner_flow) {
            inner = e;
            inner_flow = f;
        } else if (at_depot && f < depot_flow) {
            depot = e;
            depot_flow = f;
        }
    }
    return inner ? inner : depot;
}

BnbResult solve(const Instance& inst, const BnbOptions& opts) {
    const auto t0 = Clock::now();
    const TwGraph g = TwGraph::build(inst, opts.n_seg_tar, opts.table_cache);
    const double build = seconds_since(t0);
    BnbResult r = solve(g, opts);
    r.stats.wall_time_sec += build;
    return r;
}

BnbResult solve(const TwGraph& g, const BnbOptions& opts) {
    const auto t0 = Clock::now();
    std::optional<Clock::time_point> deadline;
    if (opts.time_limit_sec) {
        deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(*opts.time_limit_sec));
    }
    BnbResult res;
    BnbStats& st = res.stats;
    auto finish = [&](SolveStatus status, const Incumbent& inc) {
        res.status = status;
        res.tours = inc.tours;
        st.optimal_cost = inc.cost;
        if (inc.cost < kInf) res.solution = build_solution(g, inc.tours);
        if (status == SolveStatus::Optimal) st.lower_bound = inc.cost;
        if (status == SolveStatus::Optimal && st.root_lp < kInf && st.root_lp > 0.0)
            st.gap_percent = (inc.cost - st.root_lp) / st.root_lp * 100.0;
        st.columns = res.pool.size();
        st.wall_time_sec = seconds_since(t0);
        return res;
    };

    Incumbent inc;
    if (g.instance().n_targets() == 0) {
        inc.cost = 0.0;
        st.root_lp = 0.0;
        return finish(SolveStatus::Optimal, inc);
    }
    inc.tours = generate_feasible(g, EdgeSet(g.n_tw()));
    if (inc.tours.empty()) return finish(SolveStatus::Infeasible, inc);
    inc.cost = total_cost(g, inc.tours);
    ColumnPool& pool = res.pool;
    for (const auto& t : inc.tours) pool.add(make_tour(g, t));

    const PricingSolver pricer(g);
    PricingOptions popts;
    popts.epsilon = opts.epsilon;
    popts.label_cap = opts.label_cap;
    popts.dominance = opts.dominance;
    popts.deadline = deadline;
    popts.trace = opts.trace;

    std::vector<Node> stack{Node{EdgeSet(g.n_tw()), -kInf, 0}};
    double current_bound = -kInf;
    auto check_time = [&] {
        if (deadline && Clock::now() > *deadline) throw LimitHit("time limit reached");
    };
    auto offer = [&](const Incumbent& cand) {
        if (cand.cost < inc.cost - kPruneTol) inc = cand;
    };

    try {
        while (!stack.empty()) {
            check_time();
            Node node = std::move(stack.back());
            stack.pop_back();
            if (node.lower_bound >= inc.cost - kPruneTol) continue;
            current_bound = node.lower_bound;
            ++st.nodes_expanded;

            RmpSolution rmp;
            bool infeasible = false;
            bool tried_feasgen = false;
            for (;;) {
                check_time();
                rmp = solve_rmp(g, pool, node.banned);
                if (!rmp.optimal()) {
                    if (tried_feasgen) {
                        infeasible = true;
                        break;
                    }
                    tried_feasgen = true;
                    const auto tours = generate_feasible(g, node.banned);
                    if (tours.empty()) {
                        infeasible = true;
                        break;
                    }
                    for (const auto& t : tours) pool.add(make_tour(g, t));
                    offer({tours, total_cost(g, tours)});
                    continue;
                }
                if (const auto chosen = extract_integer(rmp)) offer(exact_cover(g, pool, *chosen));

                const auto p0 = Clock::now();
                PricingResult pr;
                try {
                    if (opts.heuristic_pricing) {
                        pr = pricer.solve_with_fallback(rmp.duals, node.banned, popts);
                    } else {
                        pr = pricer.solve(rmp.duals, node.banned, popts);
                    }
                } catch (const DeadlineExceeded&) {
                    st.pricing_time_sec += seconds_since(p0);
                    throw LimitHit("time limit reached");
                } catch (const LabelCapExceeded& e) {
                    st.pricing_time_sec += seconds_since(p0);
                    throw LimitHit(e.what());
                }
                st.pricing_time_sec += seconds_since(p0);
                ++st.pricing_calls;
                int added = 0;
                for (auto& p : pr.tours) added += pool.add(std::move(p.tour)).second;
                if (added == 0) break;
            }
            if (infeasible) continue;

            const double lp = rmp.objective;
            if (node.depth == 0) {
                st.root_lp = lp;
                res.root_duals = rmp.duals;
                res.root_pool_size = pool.size();
                if (opts.lp_dump) *opts.lp_dump << lp_text(g, pool, node.banned);
            }
            if (opts.trace) {
                nlohmann::json rec = {{"node", st.nodes_expanded}, {"depth", node.depth},
                                      {"lp", lp},                  {"columns", pool.size()},
                                      {"incumbent", inc.cost},     {"open", stack.size()}};
                *opts.trace << rec.dump() << '\n';
            }
            if (lp >= inc.cost - kPruneTol) continue;
            if (extract_integer(rmp)) continue;

            const auto edge = select_branch_edge(edge_flows(rmp, pool));
            if (!edge) throw std::runtime_error("fractional master solution with integral edge flows");
            Node ban_child{node.banned, lp, node.depth + 1};
            ban_child.banned.insert(*edge);
            Node mandate_child{std::move(node.banned), lp, node.depth + 1};
            for (const Edge& e : mandate_bans(g, *edge)) mandate_child.banned.insert(e);
            stack.push_back(std::move(ban_child));
            stack.push_back(std::move(mandate_child));
        }
    } catch (const LimitHit& e) {
        res.message = e.what();
        double bound = std::min(inc.cost, current_bound);
        for (const Node& n : stack) bound = std::min(bound, n.lower_bound);
        st.lower_bound = bound;
        return finish(SolveStatus::LimitHit, inc);
    }
    return finish(SolveStatus::Optimal, inc);
}

std::string stats_json(const BnbResult& r) {
    const BnbStats& s = r.stats;
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        return nullptr;
    };
    nlohmann::json j = {{"status", to_string(r.status)},
                        {"nodes_expanded", s.nodes_expanded},
                        {"columns", s.columns},
                        {"pricing_calls", s.pricing_calls},
                        {"root_lp", num(s.root_lp)},
                        {"optimal_cost", num(s.optimal_cost)},
                        {"lower_bound", num(s.lower_bound)},
                        {"gap_percent", num(s.gap_percent)},
                        {"wall_time_sec", s.wall_time_sec},
                        {"pricing_time_sec", s.pricing_time_sec}};
    if (!r.message.empty()) j["message"] = r.message;
    return j.dump();
}

}  // namespace mtvrp

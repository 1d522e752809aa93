#include "mtvrp/master.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mtvrp/simplex.hpp"

namespace mtvrp {

bool Tour::traverses_any(const EdgeSet& banned) const {
    if (banned.empty()) return false;
    for (std::size_t k = 1; k < sequence.size(); ++k) {
        if (banned.contains(sequence[k - 1], sequence[k])) return true;
    }
    return false;
}

std::vector<Edge> Tour::edges() const {
    std::vector<Edge> out;
    for (std::size_t k = 1; k < sequence.size(); ++k) out.emplace_back(sequence[k - 1], sequence[k]);
    return out;
}

Tour make_tour(const TwGraph& g, PartialTour sequence) {
    const double cost = tour_cost(g, sequence).cost;
    return make_tour(g, std::move(sequence), cost);
}

Tour make_tour(const TwGraph& g, PartialTour sequence, double cost) {
    Tour t;
    t.cost = cost;
    for (int tw : sequence) {
        const int target = g.tw(tw).target;
        if (target == 0) continue;
        t.visited.set(static_cast<std::size_t>(target - 1));
        t.load += g.demand(tw);
    }
    t.sequence = std::move(sequence);
    return t;
}

std::size_t ColumnPool::Hash::operator()(const PartialTour& s) const {
    std::size_t h = 1469598103934665603ull;
    for (int v : s) {
        h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

std::pair<int, bool> ColumnPool::add(Tour tour) {
    const auto it = index_.find(tour.sequence);
    if (it != index_.end()) return {it->second, false};
    const int id = size();
    index_.emplace(tour.sequence, id);
    tours_.push_back(std::move(tour));
    return {id, true};
}

std::optional<int> ColumnPool::find(const PartialTour& seq) const {
    const auto it = index_.find(seq);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

RmpSolution solve_rmp(const TwGraph& g, const ColumnPool& pool, const EdgeSet& banned) {
    const int n_tar = g.instance().n_targets();
    RmpSolution out;
    out.theta.assign(static_cast<std::size_t>(pool.size()), 0.0);
    out.duals.cover.assign(static_cast<std::size_t>(n_tar) + 1, 0.0);
    for (int i = 0; i < pool.size(); ++i) {
        if (pool[i].cost < kInf && !pool[i].traverses_any(banned)) out.active.push_back(i);
    }
    if (out.active.empty() && n_tar > 0) return out;

    lp::Problem p;
    p.n_vars = static_cast<int>(out.active.size());
    const auto n_rows = static_cast<std::size_t>(n_tar) + 1;
    p.rows.assign(n_rows, std::vector<double>(out.active.size(), 0.0));
    p.senses.assign(n_rows, lp::Sense::GreaterEqual);
    p.rhs.assign(n_rows, 1.0);
    p.senses[0] = lp::Sense::LessEqual;
    p.rhs[0] = g.instance().n_agents;
    for (std::size_t j = 0; j < out.active.size(); ++j) {
        const Tour& tour = pool[out.active[j]];
        p.cost.push_back(tour.cost);
        p.rows[0][j] = 1.0;
        for (int i = 1; i <= n_tar; ++i) {
            if (tour.visited.test(static_cast<std::size_t>(i - 1))) p.rows[static_cast<std::size_t>(i)][j] = 1.0;
        }
    }
    const lp::Solution sol = lp::solve(p);
    if (sol.status == lp::Status::Unbounded) throw std::runtime_error("master LP reported unbounded");
    if (sol.status == lp::Status::Infeasible) return out;

    out.status = RmpSolution::Status::Optimal;
    out.objective = sol.objective;
    for (std::size_t j = 0; j < out.active.size(); ++j) {
        out.theta[static_cast<std::size_t>(out.active[j])] = sol.x[j];
    }
    out.duals.fleet = std::min(0.0, sol.duals[0]);
    for (int i = 1; i <= n_tar; ++i) {
        out.duals.cover[static_cast<std::size_t>(i)] = std::max(0.0, sol.duals[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::map<Edge, double> edge_flows(const RmpSolution& sol, const ColumnPool& pool) {
    std::map<Edge, double> flows;
    for (int i : sol.active) {
        const double th = sol.theta[static_cast<std::size_t>(i)];
        if (th <= 0.0) continue;
        for (const Edge& e : pool[i].edges()) flows[e] += th;
    }
    return flows;
}

std::optional<std::vector<int>> extract_integer(const RmpSolution& sol, double tol) {
    if (!sol.optimal()) return std::nullopt;
    std::vector<int> chosen;
    for (int i : sol.active) {
        const double th = sol.theta[static_cast<std::size_t>(i)];
        const double r = std::round(th);
        if (std::abs(th - r) > tol) return std::nullopt;
        for (int k = 0; k < static_cast<int>(r); ++k) chosen.push_back(i);
    }
    return chosen;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string lp_text(const TwGraph& g, const ColumnPool& pool, const EdgeSet& banned) {
    std::vector<int> active;
    for (int i = 0; i < pool.size(); ++i) {
        if (pool[i].cost < kInf && !pool[i].traverses_any(banned)) active.push_back(i);
    }
    auto var = [](int i) { return "t" + std::to_string(i); };
    std::string s = "\\ restricted master problem\nMinimize\n obj:";
    if (active.empty()) s += " 0";
    for (int i : active) s += " + " + fmt(pool[i].cost) + " " + var(i);
    s += "\nSubject To\n fleet:";
    auto row_terms = [&](int target) {
        std::string r;
        for (int i : active) {
            if (target == 0 || pool[i].visited.test(static_cast<std::size_t>(target - 1))) r += " + " + var(i);
        }
        if (r.empty()) r = active.empty() ? " 0 dummy" : " 0 " + var(active.front());
        return r;
    };
    s += row_terms(0) + " <= " + std::to_string(g.instance().n_agents) + "\n";
    for (int t = 1; t <= g.instance().n_targets(); ++t) {
        s += " cover" + std::to_string(t) + ":" + row_terms(t) + " >= 1\n";
    }
    s += "End\n";
    return s;
}

}  // namespace mtvrp

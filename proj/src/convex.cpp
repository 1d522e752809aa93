#include "mtvrp/convex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mtvrp/socp.hpp"
#include "mtvrp/twgraph.hpp"

namespace mtvrp {

namespace {

constexpr double kPinTol = 1e-9;

// Position of an arc as P + V t.
Vec2 origin_position(const LinearArc& a) {
    return a.start_position - a.start_time * a.velocity;
}

// Latest times by backward reachability from the last node's window end.
std::vector<double> latest_times(std::span<const LinearArc> nodes, const std::vector<double>& e,
                                 double v_max) {
    const std::size_t n = nodes.size();
    std::vector<double> L(n);
    L[n - 1] = nodes[n - 1].end_time;
    for (std::size_t k = n - 1; k-- > 0;) {
        const LinearArc& next = nodes[k + 1];
        const LinearArc target = next.restricted(L[k + 1], L[k + 1]);
        double t = latest_departure_closed_form(nodes[k], target, v_max);
        if (!(t > -kInf)) t = e[k];
        L[k] = std::clamp(t, e[k], nodes[k].end_time);
    }
    return L;
}

}  // namespace

std::vector<double> earliest_times(std::span<const LinearArc> nodes, double v_max) {
    std::vector<double> e(nodes.size(), kInf);
    if (nodes.empty()) return e;
    if (nodes[0].start_time > nodes[0].end_time) return e;
    e[0] = nodes[0].start_time;
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        const LinearArc& prev = nodes[k - 1];
        e[k] = earliest_arrival({prev.position(e[k - 1]), e[k - 1]}, nodes[k], v_max);
        if (!(e[k] < kInf)) break;
    }
    return e;
}

TrajOptResult optimize_trajectory(std::span<const LinearArc> nodes, double v_max,
                                  TrajObjective objective) {
    TrajOptResult res;
    const int n = static_cast<int>(nodes.size());
    if (n == 0) {
        res.cost = 0.0;
        return res;
    }
    const std::vector<double> e = earliest_times(nodes, v_max);
    if (!(e[static_cast<std::size_t>(n - 1)] < kInf)) return res;

    auto finish = [&](std::vector<double> times) {
        res.times = std::move(times);
        res.positions.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) res.positions[k] = nodes[k].position(res.times[k]);
        if (objective == TrajObjective::FinalTime) {
            res.cost = res.times.back();
        } else {
            double c = 0.0;
            for (int k = 1; k < n; ++k) c += norm(res.positions[k] - res.positions[k - 1]);
            res.cost = c;
        }
        return res;
    };

    const std::vector<double> L = latest_times(nodes, e, v_max);
    std::vector<int> var(static_cast<std::size_t>(n), -1);  // time variable index or -1 if pinned
    int n_t = 0;
    for (int k = 0; k < n; ++k) {
        if (L[k] - e[k] > kPinTol * (1.0 + std::abs(e[k]))) var[k] = n_t++;
    }
    if (n_t == 0) return finish(e);

    // Legs that involve at least one free time.
    std::vector<int> legs;
    for (int k = 1; k < n; ++k) {
        if (var[k] >= 0 || var[k - 1] >= 0) legs.push_back(k);
    }
    const bool by_distance = objective == TrajObjective::Distance;
    if (!by_distance && var[n - 1] < 0) return finish(e);

    const int n_l = by_distance ? static_cast<int>(legs.size()) : 0;
    const int n_x = n_t + n_l;
    const int n_lin = 2 * n_t + n_l;
    const int n_soc = static_cast<int>(legs.size());
    const int m = n_lin + 3 * n_soc;

    socp::ConeProgram prog;
    prog.c = Eigen::VectorXd::Zero(n_x);
    prog.G = Eigen::MatrixXd::Zero(m, n_x);
    prog.h = Eigen::VectorXd::Zero(m);
    prog.n_linear = n_lin;
    prog.soc_dims.assign(static_cast<std::size_t>(n_soc), 3);

    int row = 0;
    for (int k = 0; k < n; ++k) {
        if (var[k] < 0) continue;
        prog.G(row, var[k]) = -1.0;  // t >= e
        prog.h(row++) = -e[k];
        prog.G(row, var[k]) = 1.0;   // t <= L
        prog.h(row++) = L[k];
    }

    // Accumulates coef * t_k into row r of G x (free) or h (pinned, moved to
    // the right-hand side with flipped sign).
    auto add_time = [&](int r, int k, double coef) {
        if (var[k] >= 0) {
            prog.G(r, var[k]) += coef;
        } else {
            prog.h(r) -= coef * e[k];
        }
    };

    if (by_distance) {
        // l_k <= v_max (t_k - t_{k-1})
        for (int j = 0; j < n_l; ++j) {
            const int k = legs[j];
            prog.G(row, n_t + j) = 1.0;
            add_time(row, k, -v_max);
            add_time(row, k - 1, v_max);
            ++row;
        }
    }
    for (int j = 0; j < n_soc; ++j) {
        const int k = legs[j];
        // s0 = l_k (or v_max (t_k - t_{k-1})), s12 = D_k = q_k(t_k) - q_{k-1}(t_{k-1})
        if (by_distance) {
            prog.G(row, n_t + j) = -1.0;
        } else {
            add_time(row, k, -v_max);
            add_time(row, k - 1, v_max);
        }
        ++row;
        const Vec2 dp = origin_position(nodes[k]) - origin_position(nodes[k - 1]);
        const Vec2 vk = nodes[k].velocity;
        const Vec2 vp = nodes[k - 1].velocity;
        prog.h(row) = dp.x;
        add_time(row, k, -vk.x);
        add_time(row, k - 1, vp.x);
        ++row;
        prog.h(row) = dp.y;
        add_time(row, k, -vk.y);
        add_time(row, k - 1, vp.y);
        ++row;
    }
    if (by_distance) {
        prog.c.tail(n_l).setOnes();
    } else {
        prog.c(var[n - 1]) = 1.0;
    }

    const socp::Result sol = socp::solve(prog);
    const bool acceptable =
        sol.converged || (sol.primal_residual <= 1e-8 && sol.dual_residual <= 1e-8 &&
                          sol.gap <= 1e-8 * std::max(1.0, std::abs(sol.primal_objective)));
    if (!acceptable) {
        throw SolverError("trajectory optimization did not converge (iterations " +
                          std::to_string(sol.iterations) + ")");
    }

    std::vector<double> times(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        times[k] = var[k] >= 0 ? std::clamp(sol.x(var[k]), e[k], L[k]) : e[k];
    }
    return finish(std::move(times));
}

double segment_distance(const LinearArc& from, const LinearArc& to, double v_max) {
    if (to.end_time < from.start_time) return kInf;
    const double t_max = latest_departure_closed_form(from, to, v_max);
    if (!(t_max >= from.start_time)) return kInf;

    // Distance from the departure at t to the nearest reachable point of `to`.
    auto phi = [&](double t) {
        const Vec2 q = from.position(t);
        const auto r = reach_time_bounds({q, t}, to, v_max);
        if (!r) return kInf;
        const Vec2 w = to.position(r->lo) - q;
        const double vv = dot(to.velocity, to.velocity);
        double s = vv > 0.0 ? -dot(w, to.velocity) / vv : 0.0;
        s = std::clamp(s, 0.0, r->hi - r->lo);
        return norm(w + s * to.velocity);
    };

    double a = from.start_time;
    double b = t_max;
    double best = std::min(phi(a), phi(b));
    if (b - a <= 0.0) return best;
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = phi(x1);
    double f2 = phi(x2);
    for (int it = 0; it < 100 && b - a > 0.0; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = phi(x2);
        }
    }
    return std::min({best, f1, f2});
}

std::vector<LinearArc> sequence_arcs(const TwGraph& g, std::span<const int> seq) {
    std::vector<LinearArc> arcs;
    arcs.reserve(seq.size());
    for (std::size_t k = 0; k < seq.size(); ++k) {
        const LinearArc& a = g.tw(seq[k]).arc;
        arcs.push_back(k == 0 && seq[k] == TwGraph::kDepot ? a.restricted(0.0, 0.0) : a);
    }
    return arcs;
}

TrajOptResult tour_cost(const TwGraph& g, std::span<const int> seq) {
    const auto arcs = sequence_arcs(g, seq);
    return optimize_trajectory(arcs, g.v_max());
}

TrajOptResult tour_cost_in_segment(const TwGraph& g, std::span<const int> seq, int segment) {
    auto arcs = sequence_arcs(g, seq);
    const Segment& s = g.segment(segment);
    arcs.back() = arcs.back().restricted(std::max(arcs.back().start_time, s.t0),
                                         std::min(arcs.back().end_time, s.t1));
    return optimize_trajectory(arcs, g.v_max());
}

double min_execution_time(const TwGraph& g, std::span<const int> seq) {
    const auto arcs = sequence_arcs(g, seq);
    return earliest_times(arcs, g.v_max()).back();
}

double reduced_cost(double cost, const TwGraph& g, std::span<const int> seq, const Duals& duals) {
    double r = cost - duals.fleet;
    for (int tw : seq) r -= duals.target(g.tw(tw).target);
    return r;
}

Solution build_solution(const TwGraph& g, const std::vector<PartialTour>& tours) {
    Solution sol;
    for (const PartialTour& seq : tours) {
        const TrajOptResult r = tour_cost(g, seq);
        if (!r.feasible()) throw std::invalid_argument("build_solution: infeasible tour");
        SolutionTour out;
        for (std::size_t k = 0; k < seq.size(); ++k) {
            const TargetWindow& tw = g.tw(seq[k]);
            out.sequence.push_back({tw.target, tw.window, r.times[k], r.positions[k]});
            out.load += g.demand(seq[k]);
        }
        sol.cost += r.cost;
        sol.tours.push_back(std::move(out));
    }
    return sol;
}

}  // namespace mtvrp

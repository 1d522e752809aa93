#pragma once

// Brute-force reference solvers. Slow by design; used to cross-check the
// production code paths.

#include <span>
#include <vector>

#include "mtvrp/convex.hpp"
#include "mtvrp/instance.hpp"
#include "mtvrp/twgraph.hpp"

namespace mtvrp::oracle {

inline constexpr int kMaxTargets = 7;

struct GridBracket {
    double lower = kInf;  // provable lower bound on the true optimum
    double upper = kInf;  // cost of the best speed-admissible grid trajectory
};

/// Layered shortest path over `resolution` + 1 equally spaced times per arc.
/// The strict grid gives an admissible trajectory (upper); a grid with
/// speed constraints relaxed by the rounding error gives the lower bound.
GridBracket grid_tour_cost(std::span<const LinearArc> nodes, double v_max, int resolution);

/// First grid time of `arc` reachable from origin; the true earliest
/// arrival lies in (result - step, result]. Returns +inf when none is.
struct GridTime {
    double time = kInf;
    double step = 0.0;
};
GridTime grid_earliest_arrival(const SpaceTimePoint& origin, const LinearArc& arc, double v_max,
                               int resolution);

/// Last departure grid time on `from` from which the end of `to` is
/// reachable; the true latest departure lies in [result, result + step).
/// Returns -inf when none is.
GridTime grid_latest_departure(const LinearArc& from, const LinearArc& to, double v_max,
                               int resolution);

struct TourRecord {
    PartialTour sequence;  // depot ... depot
    double cost = kInf;
};

struct OptimumResult {
    double cost = kInf;  // +inf when infeasible
    std::vector<TourRecord> tours;
    long enumerated = 0;
};

/// Every tour respecting capacity, time windows and `banned`, grouped by the
/// set of targets visited; for each set the cheapest tour is kept. When
/// `with_costs` is false only feasibility is established (cost 0).
std::vector<TourRecord> best_tour_per_subset(const TwGraph& g, const EdgeSet& banned,
                                             bool with_costs, long* enumerated = nullptr);

/// Minimum-cost partition of the targets into at most n_agents tours.
/// Throws std::invalid_argument above kMaxTargets targets.
OptimumResult exhaustive_optimum(const TwGraph& g);
OptimumResult exhaustive_optimum(const TwGraph& g, const EdgeSet& banned);

/// Whether some solution avoids every banned edge.
bool exhaustive_feasible(const TwGraph& g, const EdgeSet& banned);

}  // namespace mtvrp::oracle

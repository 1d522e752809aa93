#pragma once

// Exact trajectory costs for fixed interception sequences.

#include <span>
#include <stdexcept>
#include <vector>

#include "mtvrp/geometry.hpp"
#include "mtvrp/instance.hpp"

namespace mtvrp {

class TwGraph;

struct TrajOptResult {
    double cost = kInf;  // +inf when no speed-admissible trajectory exists
    std::vector<double> times;
    std::vector<Vec2> positions;

    bool feasible() const { return cost < kInf; }
};

enum class TrajObjective { Distance, FinalTime };

/// Thrown when the cone solver fails to reach the requested accuracy.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Optimal interception times for intercepting every arc in order, each inside
/// its own time interval, without exceeding v_max. Distance minimizes the
/// travelled polyline length; FinalTime minimizes the last interception time.
TrajOptResult optimize_trajectory(std::span<const LinearArc> nodes, double v_max,
                                  TrajObjective objective = TrajObjective::Distance);

/// Greedy earliest interception times; entries from the first unreachable node
/// onward are +inf.
std::vector<double> earliest_times(std::span<const LinearArc> nodes, double v_max);

/// Minimum distance between an interception of `from` and a later
/// interception of `to`; +inf when impossible.
double segment_distance(const LinearArc& from, const LinearArc& to, double v_max);

using PartialTour = std::vector<int>;

/// The arcs a sequence of target-windows must intercept. A leading depot is
/// pinned at time 0; any other depot occurrence spans the depot window.
std::vector<LinearArc> sequence_arcs(const TwGraph& g, std::span<const int> seq);

TrajOptResult tour_cost(const TwGraph& g, std::span<const int> seq);

/// As tour_cost, with the last element restricted to one of its segments.
TrajOptResult tour_cost_in_segment(const TwGraph& g, std::span<const int> seq, int segment);

/// Minimum time at which the last element of seq can be intercepted.
double min_execution_time(const TwGraph& g, std::span<const int> seq);

/// Dual values of the master LP: fleet (<= 0) and one per target, indexed by
/// target id (index 0 unused).
struct Duals {
    double fleet = 0.0;
    std::vector<double> cover;

    double target(int id) const { return id == 0 ? 0.0 : cover[static_cast<std::size_t>(id)]; }
};

/// cost - sum of cover duals of visited targets - fleet dual.
double reduced_cost(double cost, const TwGraph& g, std::span<const int> seq, const Duals& duals);

/// Solution with optimal trajectories for the given tours. Throws
/// std::invalid_argument when a tour is infeasible.
Solution build_solution(const TwGraph& g, const std::vector<PartialTour>& tours);

}  // namespace mtvrp

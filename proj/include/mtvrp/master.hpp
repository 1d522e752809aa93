#pragma once

// Restricted master problem over generated tours.

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtvrp/convex.hpp"
#include "mtvrp/twgraph.hpp"

namespace mtvrp {

/// A complete depot-to-depot tour with its exact cost.
struct Tour {
    PartialTour sequence;
    double cost = 0.0;
    double load = 0.0;
    TargetSet visited;

    bool traverses_any(const EdgeSet& banned) const;
    std::vector<Edge> edges() const;
};

/// Builds a Tour from a depot-to-depot sequence; cost is tour_cost.
Tour make_tour(const TwGraph& g, PartialTour sequence);

/// As make_tour with an already known cost.
Tour make_tour(const TwGraph& g, PartialTour sequence, double cost);

/// Append-only set of tours, deduplicated by sequence. Indices are stable.
class ColumnPool {
public:
    /// Returns the index of the tour and whether it was new.
    std::pair<int, bool> add(Tour tour);
    int size() const { return static_cast<int>(tours_.size()); }
    const Tour& operator[](int i) const { return tours_[static_cast<std::size_t>(i)]; }
    const std::vector<Tour>& tours() const { return tours_; }
    std::optional<int> find(const PartialTour& seq) const;

private:
    struct Hash {
        std::size_t operator()(const PartialTour& s) const;
    };
    std::vector<Tour> tours_;
    std::unordered_map<PartialTour, int, Hash> index_;
};

struct RmpSolution {
    enum class Status { Optimal, Infeasible };
    Status status = Status::Infeasible;
    double objective = kInf;
    /// theta per pool index; tours excluded by the banned set are 0.
    std::vector<double> theta;
    Duals duals;
    /// Pool indices that took part in the LP.
    std::vector<int> active;

    bool optimal() const { return status == Status::Optimal; }
};

/// LP relaxation over the pool tours that traverse no banned edge.
/// Throws std::runtime_error on numerical failure.
RmpSolution solve_rmp(const TwGraph& g, const ColumnPool& pool, const EdgeSet& banned);

/// Sum of theta over the tours traversing each edge (edges with zero flow
/// omitted), ordered by edge.
std::map<Edge, double> edge_flows(const RmpSolution& sol, const ColumnPool& pool);

/// Pool indices of the selected tours if every theta is within tol of an
/// integer, otherwise nullopt.
std::optional<std::vector<int>> extract_integer(const RmpSolution& sol, double tol = 1e-6);

/// The RMP in CPLEX LP text format, for debugging.
std::string lp_text(const TwGraph& g, const ColumnPool& pool, const EdgeSet& banned);

}  // namespace mtvrp

#pragma once

// Depth-first search for any solution avoiding a set of banned edges.

#include <vector>

#include "mtvrp/convex.hpp"
#include "mtvrp/twgraph.hpp"

namespace mtvrp {

struct FeasgenStats {
    long pops = 0;
    long pushed = 0;
    long pruned = 0;
};

/// At most n_agents depot-to-depot tours covering every target once and
/// traversing no banned edge; empty when none exists. Cost is ignored.
std::vector<PartialTour> generate_feasible(const TwGraph& g, const EdgeSet& banned,
                                           FeasgenStats* stats = nullptr);

}  // namespace mtvrp

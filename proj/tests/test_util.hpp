#pragma once

#include <random>
#include <vector>

#include "mtvrp/instance.hpp"

namespace mtvrp::testing {

inline Target static_target(int id, Vec2 p, std::vector<std::pair<double, double>> windows,
                            double demand = 1.0) {
    Target t{id, demand, {}};
    for (auto [t0, t1] : windows) t.windows.push_back({t0, t1, p, {0, 0}});
    return t;
}

inline Instance make_instance(std::vector<Target> targets, int n_agents = 1, double capacity = 10.0,
                              double v_max = 1.0, Vec2 depot = {0, 0}) {
    Instance inst;
    inst.n_agents = n_agents;
    inst.v_max = v_max;
    inst.capacity = capacity;
    inst.depot = depot;
    inst.targets = std::move(targets);
    validate(inst);
    return inst;
}

/// Small random instance in the shape used by the acceptance suite.
inline Instance small_random(std::uint64_t seed, int n_targets, int n_agents = 2) {
    GeneratorParams p;
    p.seed = seed;
    p.n_targets = n_targets;
    p.n_agents = n_agents;
    p.windows_per_target = 2;
    p.total_window_len = 50.0;
    p.arena_size = 100.0;
    return generate(p);
}

}  // namespace mtvrp::testing

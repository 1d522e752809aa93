#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtvrp/geometry.hpp"

namespace mtvrp {

/// Thrown for schema or invariant violations; the message starts with the
/// offending field path, e.g. "targets[2].windows[0]: t0 > t1".
class InstanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Target {
    int id = 0;
    double demand = 0.0;
    std::vector<LinearArc> windows;  // sorted, pairwise disjoint
};

struct Instance {
    int n_agents = 1;
    double v_max = 1.0;
    double capacity = 0.0;
    Vec2 depot;
    std::vector<Target> targets;  // targets[i].id == i + 1

    int n_targets() const { return static_cast<int>(targets.size()); }
    const Target& target(int id) const { return targets.at(static_cast<std::size_t>(id - 1)); }

    /// End of the depot's window. Late enough that an agent intercepting any
    /// target at any time inside its windows can still get home.
    double depot_horizon() const;
};

/// Throws InstanceError on the first violated invariant.
void validate(const Instance& inst);

struct Visit {
    int target = 0;  // 0 is the depot
    int window = 0;
    double time = 0.0;
    Vec2 position;
};

struct SolutionTour {
    std::vector<Visit> sequence;  // starts and ends with the depot
    double load = 0.0;
};

struct Solution {
    double cost = 0.0;
    std::vector<SolutionTour> tours;
};

// JSON. Floats are written with 17 significant digits and keys in sorted
// order, so dump -> parse -> dump is byte-stable.
std::string dump_canonical(const nlohmann::json& j);

nlohmann::json to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);
Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);

nlohmann::json to_json(const Solution& sol);
Solution solution_from_json(const nlohmann::json& j);
Solution load_solution(const std::filesystem::path& path);
void save_solution(const Solution& sol, const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical instance JSON.
std::uint64_t instance_hash(const Instance& inst);

struct GeneratorParams {
    std::uint64_t seed = 0;
    int n_targets = 5;
    int n_agents = 3;
    double capacity = -1.0;  // < 0 means ceil(n_targets / n_agents)
    int windows_per_target = 2;
    double total_window_len = 50.0;
    double arena_size = 100.0;
    double v_max = 1.0;
    double demand = 1.0;
};

/// Deterministic in params.seed. Every window is reachable from the depot by
/// its start time; targets violating that are redrawn.
Instance generate(const GeneratorParams& params);

struct VerifyReport {
    std::vector<std::string> violations;
    double recomputed_cost = 0.0;
    bool ok() const { return violations.empty(); }
};

VerifyReport verify(const Instance& inst, const Solution& sol, double tol = 1e-6);

}  // namespace mtvrp

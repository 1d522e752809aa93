#pragma once

// Branch-and-price over banned-edge sets.

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "mtvrp/instance.hpp"
#include "mtvrp/master.hpp"
#include "mtvrp/twgraph.hpp"

namespace mtvrp {

struct BnbOptions {
    int n_seg_tar = 32;
    std::optional<double> time_limit_sec;
    long label_cap = 50'000'000;
    /// Label dominance in pricing; off only for cross-checks.
    bool dominance = true;
    /// Heuristic pricing first with exact fallback; exact only when false.
    bool heuristic_pricing = true;
    double epsilon = 1e-4;
    std::optional<std::filesystem::path> table_cache;
    /// Line-delimited JSON progress records.
    std::ostream* trace = nullptr;
    /// Receives the root master LP once column generation finishes there.
    std::ostream* lp_dump = nullptr;
};

enum class SolveStatus { Optimal, Infeasible, LimitHit };

const char* to_string(SolveStatus s);

struct BnbStats {
    long nodes_expanded = 0;
    long columns = 0;
    long pricing_calls = 0;
    double root_lp = kInf;
    double optimal_cost = kInf;  // incumbent cost
    double lower_bound = -kInf;  // proven global bound
    double gap_percent = 0.0;
    double wall_time_sec = 0.0;
    double pricing_time_sec = 0.0;
};

struct BnbResult {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<PartialTour> tours;  // incumbent
    std::optional<Solution> solution;
    BnbStats stats;
    std::string message;  // reason for a limit hit
    /// Master duals after column generation at the root, and the number of
    /// pool columns that existed then.
    std::optional<Duals> root_duals;
    int root_pool_size = 0;
    ColumnPool pool;
};

BnbResult solve(const TwGraph& g, const BnbOptions& opts = {});
BnbResult solve(const Instance& inst, const BnbOptions& opts = {});

/// The edges to ban so that every tour visiting either end of e uses e:
/// other edges leaving e's tail and entering e's head, and every edge
/// touching other windows of those targets. The depot side is left free.
std::vector<Edge> mandate_bans(const TwGraph& g, Edge e);

/// Fractional edge to branch on: minimum flow among fractional edges away
/// from the depot, else among depot edges.
std::optional<Edge> select_branch_edge(const std::map<Edge, double>& flows, double tol = 1e-6);

/// Stats as a JSON object string.
std::string stats_json(const BnbResult& r);

}  // namespace mtvrp

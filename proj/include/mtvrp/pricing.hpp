#pragma once

// Labeling search for tours with negative reduced cost.

#include <chrono>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "mtvrp/convex.hpp"
#include "mtvrp/master.hpp"
#include "mtvrp/twgraph.hpp"

namespace mtvrp {

/// Search state for one partial tour.
struct Label {
    int tw = 0;
    double t = 0.0;       // minimum execution time
    double load = 0.0;
    TargetSet blocked;    // visited, over capacity, or out of time
    std::vector<double> g_ub;  // per segment of tw
    std::vector<double> g_lb;
    double lambda = 0.0;  // fleet dual plus cover duals of visited targets
    int parent = -1;
    long seq = 0;         // creation order
    double exact_cost = kInf;  // tour cost, set on depot labels only
    double exact_reduced = kInf;

    double min_lb() const;
};

/// True when l may replace l2 (same target-window) without losing any
/// extension. Depot labels compare exact reduced costs.
bool dominates(const TwGraph& g, const Label& l, const Label& l2);

enum class PricingMode { Heuristic, Exact };

/// Thrown when the label creation cap is exceeded.
class LabelCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when the deadline passes during a search.
class DeadlineExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PricingOptions {
    PricingMode mode = PricingMode::Exact;
    double epsilon = 1e-4;
    long label_cap = 50'000'000;
    bool dominance = true;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    /// One JSON record per search on this stream when set.
    std::ostream* trace = nullptr;
    /// Called on every created label with its partial tour.
    std::function<void(const Label&, const PartialTour&)> on_label;
};

struct PricingStats {
    long pops = 0;
    long created = 0;
    long skipped_stale = 0;
    long pruned_depot_best = 0;
    long pruned_depot_bound = 0;
    long pruned_depot_exact = 0;
    long pruned_dominated = 0;
    long removed_dominated = 0;
    long exact_evaluations = 0;
    std::size_t max_store = 0;
};

struct PricedTour {
    Tour tour;
    double reduced_cost = 0.0;
};

struct PricingResult {
    std::vector<PricedTour> tours;  // reduced cost < -epsilon, in discovery order
    PricingStats stats;

    std::optional<double> min_reduced_cost() const;
};

class PricingSolver {
public:
    explicit PricingSolver(const TwGraph& g) : g_(g) {}

    /// Target-windows that may follow l under the banned set.
    std::vector<int> successor_windows(const Label& l, const EdgeSet& banned) const;

    /// Successor of l at `tw`; nullopt when `tw` cannot be intercepted.
    std::optional<Label> extend(const Label& l, int tw, const Duals& duals) const;

    Label root(const Duals& duals) const;

    PricingResult solve(const Duals& duals, const EdgeSet& banned, const PricingOptions& opts) const;

    /// Heuristic search, then exact when the heuristic finds nothing.
    PricingResult solve_with_fallback(const Duals& duals, const EdgeSet& banned,
                                      PricingOptions opts) const;

private:
    const TwGraph& g_;
};

}  // namespace mtvrp

#pragma once

// Dense two-phase primal simplex for small linear programs:
//
//   minimize c'x  subject to  a_i'x (<= | >= | =) b_i,  x >= 0.
//
// Dantzig pricing with a switch to Bland's rule after a run of degenerate
// pivots. The final basis is refactorized to polish x and the duals.

#include <vector>

namespace mtvrp::lp {

enum class Sense { LessEqual, GreaterEqual, Equal };
enum class Status { Optimal, Infeasible, Unbounded };

struct Problem {
    int n_vars = 0;
    std::vector<double> cost;               // n_vars
    std::vector<std::vector<double>> rows;  // each n_vars long
    std::vector<Sense> senses;
    std::vector<double> rhs;
};

struct Solution {
    Status status = Status::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    /// Row duals y with c_j - y'A_j >= 0 at optimality; y_i <= 0 on <= rows
    /// and >= 0 on >= rows.
    std::vector<double> duals;
    int iterations = 0;
};

struct Options {
    double tol = 1e-9;
    int max_iterations = 100000;
    int degenerate_run_before_bland = 50;
};

/// Throws std::runtime_error when the iteration cap is hit.
Solution solve(const Problem& p, const Options& opts = {});

}  // namespace mtvrp::lp

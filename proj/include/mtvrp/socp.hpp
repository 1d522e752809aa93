#pragma once

// Small dense second-order cone program solver:
//
//   minimize c'x  subject to  G x + s = h,  s in K,
//
// where K is a nonnegative orthant of dimension n_linear followed by
// second-order cones of the listed dimensions. Infeasible-start primal-dual
// path following with Nesterov-Todd scaling and a Mehrotra corrector.
// Intended for the tiny fixed-structure programs in this library (tens of
// variables); everything is dense.

#include <vector>

#include <Eigen/Dense>

namespace mtvrp::socp {

struct ConeProgram {
    Eigen::VectorXd c;
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
    int n_linear = 0;
    std::vector<int> soc_dims;
};

struct Options {
    int max_iterations = 100;
    int refinement_steps = 2;
    double feas_tol = 1e-9;
    double abs_gap_tol = 1e-11;
    double rel_gap_tol = 1e-10;
};

struct Result {
    Eigen::VectorXd x, s, z;
    double primal_objective = 0.0;
    double gap = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Returns the best iterate found; `converged` tells whether it met the
/// tolerances.
Result solve(const ConeProgram& prog, const Options& opts = {});

// Cone algebra, exposed for tests.
struct Cone {
    int n_linear = 0;
    std::vector<int> soc_dims;

    int dim() const;
    int degree() const { return n_linear + static_cast<int>(soc_dims.size()); }
    Eigen::VectorXd identity() const;
    Eigen::VectorXd product(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    /// u with x o u = d, for x in the interior.
    Eigen::VectorXd divide(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const;
    /// sup { a >= 0 : x + a d in K } (may be +inf), for x in the interior.
    double max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const;
    /// Smallest "eigenvalue": x_i for linear parts, x0 - |x1| for cones.
    double min_eigenvalue(const Eigen::VectorXd& x) const;
};

/// Nesterov-Todd scaling W with W z = W^{-1} s (= lambda). W is symmetric.
class NtScaling {
public:
    NtScaling(const Cone& cone, const Eigen::VectorXd& s, const Eigen::VectorXd& z);

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::VectorXd apply_inverse(const Eigen::VectorXd& x) const;

private:
    const Cone& cone_;
    Eigen::VectorXd lin_;              // diagonal of W on the orthant
    std::vector<double> beta_;         // per cone
    std::vector<Eigen::VectorXd> v_;   // per cone, v'Jv = 1
};

}  // namespace mtvrp::socp

#include "mtvrp/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace mtvrp::lp {

namespace {

// Tableau over [structural | slack | artificial] columns with the objective
// row kept separately.
class Tableau {
public:
    Tableau(const Problem& p, const Options& opts) : opts_(opts), m_(static_cast<int>(p.rhs.size())) {
        n_struct_ = p.n_vars;
        // Orient every row so that b >= 0.
        std::vector<double> sign(m_, 1.0);
        for (int i = 0; i < m_; ++i) {
            if (p.rhs[i] < 0.0) sign[i] = -1.0;
        }
        int n_slack = 0;
        for (int i = 0; i < m_; ++i) n_slack += p.senses[i] != Sense::Equal;
        slack_begin_ = n_struct_;
        art_begin_ = n_struct_ + n_slack;
        // Artificials are needed on rows whose slack cannot start basic.
        std::vector<int> slack_of(m_, -1);
        int next = slack_begin_;
        for (int i = 0; i < m_; ++i) {
            if (p.senses[i] != Sense::Equal) slack_of[i] = next++;
        }
        std::vector<bool> needs_art(m_);
        int n_art = 0;
        for (int i = 0; i < m_; ++i) {
            const double slack_coef = slack_coefficient(p.senses[i]) * sign[i];
            needs_art[i] = !(slack_of[i] >= 0 && slack_coef > 0.0);
            n_art += needs_art[i];
        }
        n_ = art_begin_ + n_art;
        a_ = Eigen::MatrixXd::Zero(m_, n_);
        b_.resize(m_);
        basis_.resize(m_);
        int art = art_begin_;
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_struct_; ++j) a_(i, j) = sign[i] * p.rows[i][j];
            if (slack_of[i] >= 0) a_(i, slack_of[i]) = sign[i] * slack_coefficient(p.senses[i]);
            b_(i) = sign[i] * p.rhs[i];
            if (needs_art[i]) {
                a_(i, art) = 1.0;
                basis_[i] = art++;
            } else {
                basis_[i] = slack_of[i];
            }
        }
        original_a_ = a_;
        original_b_ = b_;
        row_sign_ = sign;
    }

    int n_struct() const { return n_struct_; }
    int art_begin() const { return art_begin_; }
    int n() const { return n_; }
    int m() const { return m_; }
    const std::vector<int>& basis() const { return basis_; }
    const Eigen::MatrixXd& original_a() const { return original_a_; }
    const Eigen::VectorXd& original_b() const { return original_b_; }
    const std::vector<double>& row_sign() const { return row_sign_; }

    // Runs the simplex on cost vector c (length n) restricted to columns
    // [0, allowed). Returns false when unbounded.
    bool optimize(const Eigen::VectorXd& c, int allowed, int& iterations) {
        int degenerate_run = 0;
        for (;;) {
            if (++iterations > opts_.max_iterations)
                throw std::runtime_error("simplex: iteration limit reached");
            // Reduced costs d_j = c_j - c_B' A_j (tableau columns are B^{-1} A).
            Eigen::VectorXd cb(m_);
            for (int i = 0; i < m_; ++i) cb(i) = c(basis_[i]);
            const bool bland = degenerate_run >= opts_.degenerate_run_before_bland;
            int enter = -1;
            double best = -opts_.tol;
            for (int j = 0; j < allowed; ++j) {
                const double d = c(j) - cb.dot(a_.col(j));
                if (d < best) {
                    enter = j;
                    if (bland) break;
                    best = d;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                const double a = a_(i, enter);
                if (a <= opts_.tol) continue;
                const double r = b_(i) / a;
                if (r < ratio - 1e-12 ||
                    (r <= ratio + 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
                    ratio = r;
                    leave = i;
                }
            }
            if (leave < 0) return false;
            degenerate_run = ratio <= opts_.tol ? degenerate_run + 1 : 0;
            pivot(leave, enter);
        }
    }

    // Pivots artificial variables out of the basis where possible.
    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < art_begin_) continue;
            int best = -1;
            for (int j = 0; j < art_begin_; ++j) {
                if (std::abs(a_(i, j)) > 1e-7 && (best < 0 || std::abs(a_(i, j)) > std::abs(a_(i, best))))
                    best = j;
            }
            if (best >= 0) pivot(i, best);
        }
    }

    double basic_value(int i) const { return b_(i); }

private:
    static double slack_coefficient(Sense s) { return s == Sense::LessEqual ? 1.0 : -1.0; }

    void pivot(int r, int col) {
        const double p = a_(r, col);
        a_.row(r) /= p;
        b_(r) /= p;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = a_(i, col);
            if (f == 0.0) continue;
            a_.row(i) -= f * a_.row(r);
            b_(i) -= f * b_(r);
        }
        basis_[r] = col;
    }

    Options opts_;
    int m_ = 0;
    int n_ = 0;
    int n_struct_ = 0;
    int slack_begin_ = 0;
    int art_begin_ = 0;
    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
    Eigen::MatrixXd original_a_;
    Eigen::VectorXd original_b_;
    std::vector<double> row_sign_;
    std::vector<int> basis_;
};

}  // namespace

Solution solve(const Problem& p, const Options& opts) {
    Solution sol;
    const int m = static_cast<int>(p.rhs.size());
    Tableau t(p, opts);

    // Phase 1: minimize the sum of artificials.
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(t.n());
    for (int j = t.art_begin(); j < t.n(); ++j) c1(j) = 1.0;
    t.optimize(c1, t.n(), sol.iterations);
    double infeas = 0.0;
    for (int i = 0; i < m; ++i) {
        if (t.basis()[i] >= t.art_begin()) infeas += t.basic_value(i);
    }
    double scale = 1.0;
    for (double b : p.rhs) scale = std::max(scale, std::abs(b));
    if (infeas > opts.tol * scale * 10.0) {
        sol.status = Status::Infeasible;
        return sol;
    }
    t.drive_out_artificials();

    // Phase 2.
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(t.n());
    for (int j = 0; j < p.n_vars; ++j) c2(j) = p.cost[j];
    if (!t.optimize(c2, t.art_begin(), sol.iterations)) {
        sol.status = Status::Unbounded;
        return sol;
    }

    // Polish from the original data with the final basis. Rows whose basic
    // variable is still artificial are redundant; their artificial stays in
    // the basis at value zero.
    const auto& basis = t.basis();
    Eigen::MatrixXd B(m, m);
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) {
        B.col(i) = t.original_a().col(basis[i]);
        cb(i) = basis[i] < p.n_vars ? p.cost[basis[i]] : 0.0;
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    const Eigen::VectorXd xb = lu.solve(t.original_b());
    const Eigen::VectorXd y = lu.transpose().solve(cb);

    sol.status = Status::Optimal;
    sol.x.assign(static_cast<std::size_t>(p.n_vars), 0.0);
    for (int i = 0; i < m; ++i) {
        if (basis[i] < p.n_vars) sol.x[basis[i]] = std::max(0.0, xb(i));
    }
    sol.objective = 0.0;
    for (int j = 0; j < p.n_vars; ++j) sol.objective += p.cost[j] * sol.x[j];
    sol.duals.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) sol.duals[i] = y(i) * t.row_sign()[i];
    return sol;
}

}  // namespace mtvrp::lp

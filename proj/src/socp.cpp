#include "mtvrp/socp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mtvrp::socp {

namespace {

constexpr double kInfStep = std::numeric_limits<double>::infinity();

// x'Jx for a cone block, J = diag(1, -1, ..., -1).
double jnorm2(const Eigen::Ref<const Eigen::VectorXd>& x) {
    return x(0) * x(0) - x.tail(x.size() - 1).squaredNorm();
}

double soc_max_step(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& d) {
    const int n = static_cast<int>(x.size());
    const auto x1 = x.tail(n - 1);
    const auto d1 = d.tail(n - 1);
    // q(a) = (x0 + a d0)^2 - |x1 + a d1|^2 = A a^2 + 2 B a + C, C > 0.
    const double A = d(0) * d(0) - d1.squaredNorm();
    const double B = x(0) * d(0) - x1.dot(d1);
    const double C = x(0) * x(0) - x1.squaredNorm();
    double step = kInfStep;
    if (d(0) < 0.0) step = std::min(step, -x(0) / d(0));
    if (A == 0.0) {
        if (B < 0.0) step = std::min(step, -C / (2.0 * B));
        return step;
    }
    const double disc = B * B - A * C;
    if (disc < 0.0) return step;
    const double sq = std::sqrt(disc);
    const double q = -(B + (B >= 0.0 ? sq : -sq));
    for (double r : {q / A, q != 0.0 ? C / q : kInfStep}) {
        if (r > 0.0) step = std::min(step, r);
    }
    return step;
}

}  // namespace

int Cone::dim() const {
    int d = n_linear;
    for (int q : soc_dims) d += q;
    return d;
}

Eigen::VectorXd Cone::identity() const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim());
    e.head(n_linear).setOnes();
    int off = n_linear;
    for (int q : soc_dims) {
        e(off) = 1.0;
        off += q;
    }
    return e;
}

Eigen::VectorXd Cone::product(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd r(x.size());
    r.head(n_linear) = x.head(n_linear).cwiseProduct(y.head(n_linear));
    int off = n_linear;
    for (int q : soc_dims) {
        const auto xb = x.segment(off, q);
        const auto yb = y.segment(off, q);
        r(off) = xb.dot(yb);
        r.segment(off + 1, q - 1) = xb(0) * yb.tail(q - 1) + yb(0) * xb.tail(q - 1);
        off += q;
    }
    return r;
}

Eigen::VectorXd Cone::divide(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const {
    Eigen::VectorXd u(x.size());
    u.head(n_linear) = d.head(n_linear).cwiseQuotient(x.head(n_linear));
    int off = n_linear;
    for (int q : soc_dims) {
        const auto xb = x.segment(off, q);
        const auto db = d.segment(off, q);
        const auto x1 = xb.tail(q - 1);
        const double u0 = (xb(0) * db(0) - x1.dot(db.tail(q - 1))) / jnorm2(xb);
        u(off) = u0;
        u.segment(off + 1, q - 1) = (db.tail(q - 1) - u0 * x1) / xb(0);
        off += q;
    }
    return u;
}

double Cone::max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const {
    double step = kInfStep;
    for (int i = 0; i < n_linear; ++i) {
        if (d(i) < 0.0) step = std::min(step, -x(i) / d(i));
    }
    int off = n_linear;
    for (int q : soc_dims) {
        step = std::min(step, soc_max_step(x.segment(off, q), d.segment(off, q)));
        off += q;
    }
    return step;
}

double Cone::min_eigenvalue(const Eigen::VectorXd& x) const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_linear; ++i) m = std::min(m, x(i));
    int off = n_linear;
    for (int q : soc_dims) {
        m = std::min(m, x(off) - x.segment(off + 1, q - 1).norm());
        off += q;
    }
    return m;
}

NtScaling::NtScaling(const Cone& cone, const Eigen::VectorXd& s, const Eigen::VectorXd& z)
    : cone_(cone) {
    lin_ = (s.head(cone.n_linear).array() / z.head(cone.n_linear).array()).sqrt();
    int off = cone.n_linear;
    for (int q : cone.soc_dims) {
        const Eigen::VectorXd sb = s.segment(off, q);
        const Eigen::VectorXd zb = z.segment(off, q);
        const double sn = std::sqrt(jnorm2(sb));
        const double zn = std::sqrt(jnorm2(zb));
        const Eigen::VectorXd sbar = sb / sn;
        Eigen::VectorXd jzbar = zb / zn;
        jzbar.tail(q - 1) *= -1.0;
        const double sz = sbar(0) * jzbar(0) - sbar.tail(q - 1).dot(jzbar.tail(q - 1));
        // sz is sbar'zbar since jzbar = J zbar.
        // Scaling point wbar with wbar'J wbar = 1, then W/beta = 2vv' - J with
        // v = (wbar + e) / sqrt(2 (1 + wbar0)).
        Eigen::VectorXd v = (sbar + jzbar) / std::sqrt(2.0 * (1.0 + sz));
        const double w0 = v(0);
        v(0) += 1.0;
        v /= std::sqrt(2.0 * (1.0 + w0));
        beta_.push_back(std::sqrt(sn / zn));
        v_.push_back(std::move(v));
        off += q;
    }
}

Eigen::VectorXd NtScaling::apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r(x.size());
    r.head(cone_.n_linear) = lin_.cwiseProduct(x.head(cone_.n_linear));
    int off = cone_.n_linear;
    for (std::size_t k = 0; k < v_.size(); ++k) {
        const int q = cone_.soc_dims[k];
        const auto xb = x.segment(off, q);
        const Eigen::VectorXd& v = v_[k];
        Eigen::VectorXd jx = xb;
        jx.tail(q - 1) *= -1.0;
        // W x = beta (2 v v'x - J x)
        r.segment(off, q) = beta_[k] * (2.0 * v.dot(xb) * v - jx);
        off += q;
    }
    return r;
}

Eigen::VectorXd NtScaling::apply_inverse(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r(x.size());
    r.head(cone_.n_linear) = x.head(cone_.n_linear).cwiseQuotient(lin_);
    int off = cone_.n_linear;
    for (std::size_t k = 0; k < v_.size(); ++k) {
        const int q = cone_.soc_dims[k];
        const auto xb = x.segment(off, q);
        Eigen::VectorXd jv = v_[k];
        jv.tail(q - 1) *= -1.0;
        Eigen::VectorXd jx = xb;
        jx.tail(q - 1) *= -1.0;
        // W^{-1} x = (2 Jv (Jv)'x - J x) / beta
        r.segment(off, q) = (2.0 * jv.dot(xb) * jv - jx) / beta_[k];
        off += q;
    }
    return r;
}

Result solve(const ConeProgram& prog, const Options& opts) {
    const Cone cone{prog.n_linear, prog.soc_dims};
    const int n = static_cast<int>(prog.c.size());
    const int m = cone.dim();
    const Eigen::MatrixXd& G = prog.G;
    const Eigen::VectorXd& h = prog.h;
    const Eigen::VectorXd& c = prog.c;
    const Eigen::VectorXd e = cone.identity();
    const double deg = cone.degree();

    // Starting point: least-squares primal, minimum-norm dual, both pushed
    // into the interior of K.
    const Eigen::LDLT<Eigen::MatrixXd> gtg(G.transpose() * G);
    Eigen::VectorXd x = gtg.solve(G.transpose() * h);
    Eigen::VectorXd s = h - G * x;
    Eigen::VectorXd z = -G * gtg.solve(c);
    for (Eigen::VectorXd* v : {&s, &z}) {
        const double a = -cone.min_eigenvalue(*v);
        if (a >= -1e-8 * std::max(v->norm(), 1.0)) *v += (1.0 + a) * e;
    }

    const double h_scale = std::max(1.0, h.norm());
    const double c_scale = std::max(1.0, c.norm());

    // Iterates can degrade once rounding dominates; the best one seen is
    // returned, scored by its worst relative residual.
    Result best;
    double best_score = std::numeric_limits<double>::infinity();
    auto record = [&](int it, double pres, double dres, double gap, double pcost) {
        const double score =
            std::max({pres, dres, gap / std::max(1.0, std::abs(pcost))});
        if (score < best_score) {
            best_score = score;
            best.x = x;
            best.s = s;
            best.z = z;
            best.primal_residual = pres;
            best.dual_residual = dres;
            best.gap = gap;
            best.primal_objective = pcost;
        }
        best.iterations = it;
    };

    for (int it = 0; it <= opts.max_iterations; ++it) {
        const Eigen::VectorXd rx = G.transpose() * z + c;
        const Eigen::VectorXd rz = G * x + s - h;
        const double gap = s.dot(z);
        const double pcost = c.dot(x);
        const double pres = rz.norm() / h_scale;
        const double dres = rx.norm() / c_scale;
        record(it, pres, dres, gap, pcost);
        if (pres <= opts.feas_tol && dres <= opts.feas_tol &&
            (gap <= opts.abs_gap_tol || gap <= opts.rel_gap_tol * std::max(1.0, std::abs(pcost)))) {
            best.converged = true;
            break;
        }
        if (it == opts.max_iterations) break;
        // Stop once the iterates have clearly started to deteriorate.
        if (std::max(pres, dres) > 1e3 * best_score && best_score < 1e-6) break;

        const double mu = gap / deg;
        const NtScaling W(cone, s, z);
        const Eigen::VectorXd lambda = W.apply(z);
        const Eigen::VectorXd lambda_sq = cone.product(lambda, lambda);

        Eigen::MatrixXd WinvG(m, n);
        for (int j = 0; j < n; ++j) WinvG.col(j) = W.apply_inverse(G.col(j));
        const Eigen::LDLT<Eigen::MatrixXd> H(WinvG.transpose() * WinvG);
        if (H.info() != Eigen::Success) break;

        struct Dir {
            Eigen::VectorXd dx, ds, dz;
        };
        // Solves  G'dz = -rxt,  G dx + ds = -rzt,  lambda o (W dz + W^{-1} ds) = d_s.
        auto solve_once = [&](const Eigen::VectorXd& rxt, const Eigen::VectorXd& rzt,
                              const Eigen::VectorXd& d_s) {
            const Eigen::VectorXd u = cone.divide(lambda, d_s);
            const Eigen::VectorXd Wu = W.apply(u);
            const Eigen::VectorXd rhs_z = rzt + Wu;
            const Eigen::VectorXd w2inv_rhs = W.apply_inverse(W.apply_inverse(rhs_z));
            Dir d;
            d.dx = H.solve(-rxt - G.transpose() * w2inv_rhs);
            d.dz = W.apply_inverse(W.apply_inverse(G * d.dx + rhs_z));
            d.ds = Wu - W.apply(W.apply(d.dz));
            return d;
        };
        // Normal equations lose accuracy as W degenerates near the optimum;
        // a few refinement steps against the full system recover it.
        auto newton = [&](const Eigen::VectorXd& rxt, const Eigen::VectorXd& rzt,
                          const Eigen::VectorXd& d_s) {
            Dir d = solve_once(rxt, rzt, d_s);
            for (int r = 0; r < opts.refinement_steps; ++r) {
                const Eigen::VectorXd ex = -rxt - G.transpose() * d.dz;
                const Eigen::VectorXd ez = -rzt - G * d.dx - d.ds;
                const Eigen::VectorXd es =
                    d_s - cone.product(lambda, W.apply(d.dz) + W.apply_inverse(d.ds));
                const Dir c = solve_once(-ex, -ez, es);
                d.dx += c.dx;
                d.dz += c.dz;
                d.ds += c.ds;
            }
            return d;
        };

        const Dir aff = newton(rx, rz, -lambda_sq);
        const double a_aff =
            std::min({1.0, cone.max_step(s, aff.ds), cone.max_step(z, aff.dz)});
        const double gap_aff = (s + a_aff * aff.ds).dot(z + a_aff * aff.dz);
        const double sigma = std::clamp(std::pow(std::max(gap_aff, 0.0) / gap, 3.0), 0.0, 1.0);

        const Eigen::VectorXd corr = cone.product(W.apply_inverse(aff.ds), W.apply(aff.dz));
        const Dir dir = newton((1.0 - sigma) * rx, (1.0 - sigma) * rz,
                               -lambda_sq - corr + sigma * mu * e);
        const double a_max = std::min(cone.max_step(s, dir.ds), cone.max_step(z, dir.dz));
        const double alpha = std::min(1.0, 0.99 * a_max);
        if (!(alpha > 1e-14)) break;
        x += alpha * dir.dx;
        s += alpha * dir.ds;
        z += alpha * dir.dz;
    }

    return best;
}

}  // namespace mtvrp::socp

#include "swingsafe/errors.hpp"
#include "swingsafe/solvers.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace swingsafe {
namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// Largest a in (0, 1] with v + a dv >= 0.
double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
    return a;
}

// Full KKT matrix
//   [ H + D   R1'      R2'  ]
//   [ R1     -S/Z      0    ]
//   [ R2      0       -reg  ]
// kept with a fixed sparsity pattern so the symbolic analysis is done once.
class KktSystem {
public:
    KktSystem(const QpInstance& qp, double reg) : qp_(qp), reg_(reg) {
        const int n = qp.dim(), p = qp.n_ineq(), q = qp.n_eq();
        std::vector<Triplet> t;
        for (int r = 0; r < n; ++r) {
            t.emplace_back(r, r, 0.0);
            for (SparseMatrix::InnerIterator it(qp.H, r); it; ++it)
                t.emplace_back(r, static_cast<int>(it.col()), it.value());
        }
        for (int r = 0; r < p; ++r) {
            for (SparseMatrix::InnerIterator it(qp.R1, r); it; ++it) {
                t.emplace_back(n + r, static_cast<int>(it.col()), it.value());
                t.emplace_back(static_cast<int>(it.col()), n + r, it.value());
            }
            t.emplace_back(n + r, n + r, -1.0);
        }
        for (int r = 0; r < q; ++r) {
            for (SparseMatrix::InnerIterator it(qp.R2, r); it; ++it) {
                t.emplace_back(n + p + r, static_cast<int>(it.col()), it.value());
                t.emplace_back(static_cast<int>(it.col()), n + p + r, it.value());
            }
            t.emplace_back(n + p + r, n + p + r, -reg);
        }
        k_.resize(n + p + q, n + p + q);
        k_.setFromTriplets(t.begin(), t.end());
        k_.makeCompressed();
        for (int r = 0; r < n + p; ++r) diag_.push_back(&k_.coeffRef(r, r));
        base_.resize(n);
        for (int r = 0; r < n; ++r) base_[r] = *diag_[r];
        lu_.analyzePattern(k_);
    }

    // ineq_diag[i] = s_i / z_i
    bool factor(const Eigen::VectorXd& ineq_diag) {
        const int n = qp_.dim();
        for (int r = 0; r < n; ++r) *diag_[r] = base_[r] + reg_;
        for (Eigen::Index i = 0; i < ineq_diag.size(); ++i) *diag_[n + i] = -ineq_diag[i];
        lu_.factorize(k_);
        return lu_.info() == Eigen::Success;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) {
        // One round of refinement removes most of the regularization bias.
        Eigen::VectorXd x = lu_.solve(rhs);
        const Eigen::VectorXd res = rhs - apply_unregularized(x);
        x += lu_.solve(res);
        return x;
    }

private:
    Eigen::VectorXd apply_unregularized(const Eigen::VectorXd& x) const {
        Eigen::VectorXd y = k_ * x;
        const int n = qp_.dim(), q = qp_.n_eq();
        y.head(n) -= reg_ * x.head(n);
        y.tail(q) += reg_ * x.tail(q);
        return y;
    }

    const QpInstance& qp_;
    double reg_;
    ColMatrix k_;
    std::vector<double*> diag_;
    std::vector<double> base_;
    Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

} // namespace

QpSolution solve_qp_reference(const QpInstance& qp, const ReferenceOptions& opts) {
    check_dimensions(qp);
    const int n = qp.dim(), p = qp.n_ineq(), q = qp.n_eq();
    KktSystem kkt(qp, 1e-11);

    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd s(p), z(p);
    if (p > 0) {
        const Eigen::VectorXd slack = qp.r1 - qp.R1 * y;
        s = slack.cwiseMax(1.0);
        z.setOnes();
    }

    QpSolution best;
    double best_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::VectorXd eta = z;
        const KktResidual res = kkt_residual(qp, y, eta, mu);
        if (res.max() < best_res) {
            best_res = res.max();
            best = {y, eta, mu, it, res};
        }
        if (res.max() <= opts.tol) return best;

        // Residuals of the slack formulation R1 y + s = r1.
        Eigen::VectorXd rd = qp.H * y + qp.f;
        if (p > 0) rd += qp.R1.transpose() * z;
        if (q > 0) rd += qp.R2.transpose() * mu;
        Eigen::VectorXd rp1 = p > 0 ? Eigen::VectorXd(qp.R1 * y + s - qp.r1) : Eigen::VectorXd();
        Eigen::VectorXd rp2 = q > 0 ? Eigen::VectorXd(qp.R2 * y - qp.r2) : Eigen::VectorXd();
        const double gap = p > 0 ? s.dot(z) / p : 0.0;

        const Eigen::VectorXd w = p > 0 ? Eigen::VectorXd(s.cwiseQuotient(z)) : Eigen::VectorXd();
        if (!kkt.factor(w)) throw NoConvergence("interior point: KKT factorization failed");

        // With dz from the second block row:  R1 dy - (S/Z) dz = -rp1 - rc/z
        // where rc is the complementarity target minus s*z.
        auto direction = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dy, Eigen::VectorXd& ds,
                             Eigen::VectorXd& dz, Eigen::VectorXd& dmu) {
            Eigen::VectorXd rhs(n + p + q);
            rhs.head(n) = -rd;
            if (p > 0) rhs.segment(n, p) = -rp1 - rc.cwiseQuotient(z);
            if (q > 0) rhs.tail(q) = -rp2;
            const Eigen::VectorXd sol = kkt.solve(rhs);
            dy = sol.head(n);
            dz = sol.segment(n, p);
            dmu = sol.tail(q);
            if (p > 0) ds = -rp1 - qp.R1 * dy;
        };

        Eigen::VectorXd dy, ds, dz, dmu;
        if (p > 0) {
            const Eigen::VectorXd rc_aff = -s.cwiseProduct(z);
            direction(rc_aff, dy, ds, dz, dmu);
            const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
            const double gap_aff = (s + a_aff * ds).dot(z + a_aff * dz) / p;
            const double sigma = std::pow(gap_aff / gap, 3);
            const Eigen::VectorXd rc =
                -s.cwiseProduct(z) - ds.cwiseProduct(dz) + Eigen::VectorXd::Constant(p, sigma * gap);
            direction(rc, dy, ds, dz, dmu);
            const double a = std::min(1.0, 0.995 * std::min(max_step(s, ds), max_step(z, dz)));
            y += a * dy;
            s += a * ds;
            z += a * dz;
            mu += a * dmu;
            s = s.cwiseMax(1e-300);
            z = z.cwiseMax(1e-300);
        } else {
            direction(Eigen::VectorXd(), dy, ds, dz, dmu);
            y += dy;
            mu += dmu;
        }
        if (!y.allFinite() || !mu.allFinite())
            throw NoConvergence("interior point: iterate became non-finite");
    }
    const KktResidual res = kkt_residual(qp, y, z, mu);
    if (res.max() <= opts.tol) return {y, z, mu, opts.max_iterations, res};
    throw NoConvergence("interior point: no convergence after " + std::to_string(opts.max_iterations) +
                        " iterations (stationarity " + std::to_string(best.kkt.stationarity) +
                        ", inequality " + std::to_string(best.kkt.primal_ineq) + ", equality " +
                        std::to_string(best.kkt.primal_eq) + ", complementarity " +
                        std::to_string(best.kkt.complementarity) + ")");
}

} // namespace swingsafe

#include "swingsafe/errors.hpp"
#include "swingsafe/kernels.hpp"
#include "swingsafe/solvers.hpp"
#include "swingsafe/detail/span.hpp"

#include "saddle_driver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace swingsafe {

SaddleState SaddleState::zeros(const QpInstance& qp) {
    return {Eigen::VectorXd::Zero(qp.dim()), Eigen::VectorXd::Zero(qp.n_ineq()),
            Eigen::VectorXd::Zero(qp.n_eq())};
}

SaddleOperator::SaddleOperator(const QpInstance& q)
    : qp(&q), R1t(q.R1.transpose()), R2t(q.R2.transpose()) {
    R1t.makeCompressed();
    R2t.makeCompressed();
    if (R1t.rows() != q.dim()) R1t.resize(q.dim(), q.n_ineq());
    if (R2t.rows() != q.dim()) R2t.resize(q.dim(), q.n_eq());
}

double SaddleOperator::gradient_entry(int j, const double* z, const double* eta,
                                      const double* mu) const {
    double a = 0.0;
    for (SparseMatrix::InnerIterator it(qp->H, j); it; ++it) a += it.value() * z[it.col()];
    a += qp->f[j];
    double b = 0.0;
    for (SparseMatrix::InnerIterator it(R1t, j); it; ++it) b += it.value() * eta[it.col()];
    double c = 0.0;
    for (SparseMatrix::InnerIterator it(R2t, j); it; ++it) c += it.value() * mu[it.col()];
    return (a + b) + c;
}

double SaddleOperator::ineq_entry(int r, const double* z) const {
    double a = 0.0;
    for (SparseMatrix::InnerIterator it(qp->R1, r); it; ++it) a += it.value() * z[it.col()];
    return a - qp->r1[r];
}

double SaddleOperator::eq_entry(int r, const double* z) const {
    double a = 0.0;
    for (SparseMatrix::InnerIterator it(qp->R2, r); it; ++it) a += it.value() * z[it.col()];
    return a - qp->r2[r];
}

SaddleDerivative saddle_rhs(const QpInstance& qp, const SaddleState& s, const SaddleGains& gains) {
    check_dimensions(qp);
    if (s.z.size() != qp.dim() || s.eta.size() != qp.n_ineq() || s.mu.size() != qp.n_eq())
        throw DimensionMismatch("saddle state does not match the program");
    const SaddleOperator op(qp);
    SaddleDerivative d{Eigen::VectorXd(qp.dim()), Eigen::VectorXd(qp.n_ineq()),
                       Eigen::VectorXd(qp.n_eq())};
    for (int j = 0; j < qp.dim(); ++j)
        d.dz[j] = -op.gradient_entry(j, s.z.data(), s.eta.data(), s.mu.data()) / gains.primal;
    Eigen::VectorXd r(qp.n_ineq());
    for (int i = 0; i < qp.n_ineq(); ++i) r[i] = op.ineq_entry(i, s.z.data());
    kernels::projected_direction(detail::span_of(d.deta), detail::span_of(r), detail::span_of(s.eta));
    d.deta /= gains.ineq;
    for (int i = 0; i < qp.n_eq(); ++i) d.dmu[i] = op.eq_entry(i, s.z.data()) / gains.eq;
    return d;
}

double saddle_step_limit(const QpInstance& qp, const SaddleGains& gains) {
    const int n = qp.dim(), p = qp.n_ineq(), q = qp.n_eq();
    const int total = n + p + q;
    constexpr int kDenseLimit = 3000;
    if (total > kDenseLimit) {
        // Too large for a dense eigensolve: fall back to a Gershgorin bound.
        Eigen::VectorXd row(total);
        row.setZero();
        for (int r = 0; r < n; ++r) {
            for (SparseMatrix::InnerIterator it(qp.H, r); it; ++it) row[r] += std::abs(it.value());
            row[r] /= gains.primal;
        }
        const SparseMatrix r1t = qp.R1.transpose(), r2t = qp.R2.transpose();
        for (int r = 0; r < n; ++r) {
            double a = 0.0;
            for (SparseMatrix::InnerIterator it(r1t, r); it; ++it) a += std::abs(it.value());
            for (SparseMatrix::InnerIterator it(r2t, r); it; ++it) a += std::abs(it.value());
            row[r] += a / gains.primal;
        }
        return 0.5 / std::max(row.maxCoeff(), 1e-300);
    }
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(total, total);
    j.topLeftCorner(n, n) = -Eigen::MatrixXd(qp.H) / gains.primal;
    if (p > 0) {
        const Eigen::MatrixXd r1(qp.R1);
        j.block(0, n, n, p) = -r1.transpose() / gains.primal;
        j.block(n, 0, p, n) = r1 / gains.ineq;
    }
    if (q > 0) {
        const Eigen::MatrixXd r2(qp.R2);
        j.block(0, n + p, n, q) = -r2.transpose() / gains.primal;
        j.block(n + p, 0, q, n) = r2 / gains.eq;
    }
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(j, false).eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    std::vector<std::complex<double>> modes;
    double h_stab = std::numeric_limits<double>::infinity();
    for (const auto& l : ev) {
        if (std::abs(l) <= 1e-10 * scale || l.real() >= 0.0) continue;
        modes.push_back(l);
        h_stab = std::min(h_stab, 2.0 * -l.real() / std::norm(l));
    }
    if (modes.empty()) return 1.0;
    // The worst amplification max |1 + h l| is convex in h.
    auto worst = [&](double h) {
        double w = 0.0;
        for (const auto& l : modes) w = std::max(w, std::abs(1.0 + h * l));
        return w;
    };
    double lo = 0.0, hi = h_stab;
    for (int it = 0; it < 100; ++it) {
        const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
        if (worst(a) <= worst(b)) hi = b;
        else lo = a;
    }
    return std::min(0.5 * (lo + hi), 0.9 * h_stab);
}

double effective_step(const QpInstance& qp, const SaddleOptions& opts) {
    if (!(opts.step > 0.0)) throw PreconditionError("saddle step must be positive");
    if (!opts.limit_step) return opts.step;
    return std::min(opts.step, saddle_step_limit(qp, opts.gains));
}


SaddleResult saddle_integrate(const QpInstance& qp, const SaddleState& start,
                              const SaddleOptions& opts, const Eigen::VectorXd* oracle) {
    check_dimensions(qp);
    if (start.z.size() != qp.dim() || start.eta.size() != qp.n_ineq() ||
        start.mu.size() != qp.n_eq())
        throw DimensionMismatch("saddle state does not match the program");
    if ((start.eta.array() < 0.0).any()) throw PreconditionError("inequality multipliers must be >= 0");
    const double h = effective_step(qp, opts);
    const double cz = h / opts.gains.primal, ce = h / opts.gains.ineq, cm = h / opts.gains.eq;
    const SaddleOperator op(qp);
    Eigen::VectorXd r1(qp.n_ineq()), r2(qp.n_eq());

    return detail::run_saddle(qp, start, opts, oracle, h, [&](SaddleState& s, Eigen::VectorXd& g) {
        for (int j = 0; j < qp.dim(); ++j) g[j] = op.gradient_entry(j, s.z.data(), s.eta.data(), s.mu.data());
        for (int r = 0; r < qp.n_ineq(); ++r) r1[r] = op.ineq_entry(r, s.z.data());
        for (int r = 0; r < qp.n_eq(); ++r) r2[r] = op.eq_entry(r, s.z.data());
        kernels::primal_step(detail::span_of(s.z), detail::span_of(g), cz);
        kernels::dual_ineq_step(detail::span_of(s.eta), detail::span_of(r1), ce);
        kernels::dual_eq_step(detail::span_of(s.mu), detail::span_of(r2), cm);
    });
}

} // namespace swingsafe

#include "swingsafe/mpc_qp.hpp"

#include "swingsafe/errors.hpp"

#include <cmath>

namespace swingsafe {

MpcLayout::MpcLayout(const PowerNetwork& net, int horizon_steps)
    : m(net.n_lines()), n(net.n_buses()), horizon(horizon_steps),
      n_safe(static_cast<int>(net.safety.size())) {}

namespace {

SparseMatrix build(int rows, int cols, const std::vector<Triplet>& t) {
    SparseMatrix s(rows, cols);
    s.setFromTriplets(t.begin(), t.end());
    s.prune(0.0);
    s.makeCompressed();
    return s;
}

// Appends `scale * M.row(r)` shifted to column `col0`.
void add_row(std::vector<Triplet>& t, int out_row, const SparseMatrix& mat, int r, int col0,
             double scale) {
    for (SparseMatrix::InnerIterator it(mat, r); it; ++it)
        t.emplace_back(out_row, col0 + static_cast<int>(it.col()), scale * it.value());
}

Eigen::VectorXd sample_vector(const PowerNetwork& net, const SystemState& s) {
    const int m = net.n_lines(), n = net.n_buses();
    if (s.lambda.size() != m || s.omega.size() != n || s.alpha_bl.size() != n)
        throw DimensionMismatch("sampled state has the wrong size");
    Eigen::VectorXd x(m + 2 * n);
    x << s.lambda, s.omega, s.alpha_bl;
    for (int i = 0; i < n; ++i)
        if (!net.is_controlled(i)) x[m + n + i] = 0.0;
    return x;
}

} // namespace

QpInstance assemble_mpc_qp(const DiscreteModel& dm, const PowerNetwork& net,
                           const ControllerConfig& cfg, const SystemState& sample,
                           const std::vector<Eigen::VectorXd>& forecast, MpcObjective objective) {
    const int n = net.n_buses();
    const int m = net.n_lines();
    const int N = dm.horizon;
    if (dm.n != n || dm.m != m) throw DimensionMismatch("discrete model does not match the network");
    if (N < 1) throw PreconditionError("prediction horizon must be at least one step");
    if (static_cast<int>(forecast.size()) < N) throw DimensionMismatch("forecast shorter than horizon");
    for (int k = 0; k < N; ++k)
        if (forecast[k].size() != n) throw DimensionMismatch("forecast entry has the wrong size");
    for (int i : net.controlled)
        if (!(cfg.cost_weight[i] > 0.0) || !(cfg.epsilon[i] > 0.0))
            throw PreconditionError("cost weight and filter slope must be positive on I_u");
    for (int i : net.safety)
        if (!(cfg.violation_weight[i] > 0.0))
            throw PreconditionError("violation weight must be positive on I_omega");

    const MpcLayout L(net, N);
    const int blk = L.block();
    const int dim = L.dim();
    const Eigen::VectorXd x0 = sample_vector(net, sample);

    QpInstance qp;
    qp.n_nodes = n;
    for (const Line& l : net.lines) qp.edge_ends.emplace_back(l.pos, l.neg);
    auto state_owner = [&](int idx) {
        if (idx < m) return n + idx;
        return (idx - m) % n;
    };
    qp.owner.resize(dim);
    for (int k = 1; k <= N; ++k)
        for (int idx = 0; idx < blk; ++idx) qp.owner[L.state(k, idx)] = state_owner(idx);
    for (int i = 0; i < n; ++i) qp.owner[L.u(i)] = i;
    for (int k = 1; k <= N; ++k)
        for (int p = 0; p < L.n_safe; ++p) qp.owner[L.s(k, p)] = net.safety[p];

    // Dynamics rows: F x(k+1) - A x(k) - B2 u = B1 p(k), k = 1..N-1.
    std::vector<Triplet> dyn;
    const int n_dyn = (N - 1) * blk;
    Eigen::VectorXd dyn_rhs(n_dyn);
    for (int k = 1; k < N; ++k) {
        const Eigen::VectorXd bp = dm.B1 * forecast[k - 1];
        for (int r = 0; r < blk; ++r) {
            const int row = (k - 1) * blk + r;
            add_row(dyn, row, dm.F, r, L.state(k + 1, 0), 1.0);
            add_row(dyn, row, dm.A, r, L.state(k, 0), -1.0);
            add_row(dyn, row, dm.B2, r, L.u(0), -1.0);
            dyn_rhs[row] = bp[r];
        }
    }

    // Equalities: dynamics, x(1) = x(t^w), u_w = 0 outside I_u.
    std::vector<Triplet> eq = dyn;
    std::vector<double> eq_rhs(dyn_rhs.data(), dyn_rhs.data() + n_dyn);
    for (int k = 1; k < N; ++k)
        for (int r = 0; r < blk; ++r) qp.eq_owner.push_back(state_owner(r));
    for (int r = 0; r < blk; ++r) {
        eq.emplace_back(static_cast<int>(eq_rhs.size()), L.state(1, r), 1.0);
        eq_rhs.push_back(x0[r]);
        qp.eq_owner.push_back(state_owner(r));
    }
    for (int w = 0; w < n; ++w) {
        if (net.is_controlled(w)) continue;
        eq.emplace_back(static_cast<int>(eq_rhs.size()), L.u(w), 1.0);
        eq_rhs.push_back(0.0);
        qp.eq_owner.push_back(w);
    }
    qp.R2 = build(static_cast<int>(eq_rhs.size()), dim, eq);
    qp.r2 = Eigen::Map<Eigen::VectorXd>(eq_rhs.data(), static_cast<Eigen::Index>(eq_rhs.size()));

    // Inequalities: soft frequency band, then the filter-slope bound on u.
    std::vector<Triplet> in;
    std::vector<double> in_rhs;
    for (int k = 1; k <= N; ++k) {
        for (int p = 0; p < L.n_safe; ++p) {
            const int i = net.safety[p];
            int row = static_cast<int>(in_rhs.size());
            in.emplace_back(row, L.omega(k, i), 1.0);
            in.emplace_back(row, L.s(k, p), -1.0);
            in_rhs.push_back(cfg.omega_max[i]);
            in.emplace_back(row + 1, L.omega(k, i), -1.0);
            in.emplace_back(row + 1, L.s(k, p), -1.0);
            in_rhs.push_back(-cfg.omega_min[i]);
            qp.ineq_owner.push_back(i);
            qp.ineq_owner.push_back(i);
        }
    }
    qp.sign_pattern.assign(n, 1);
    for (int i : net.controlled) {
        const double a = x0[m + n + i];
        const int sgn = a >= 0.0 ? 1 : -1;
        qp.sign_pattern[i] = sgn;
        const double bound = cfg.epsilon[i] * sgn * a;
        int row = static_cast<int>(in_rhs.size());
        in.emplace_back(row, L.u(i), 1.0);
        in_rhs.push_back(bound);
        in.emplace_back(row + 1, L.u(i), -1.0);
        in_rhs.push_back(bound);
        qp.ineq_owner.push_back(i);
        qp.ineq_owner.push_back(i);
    }
    qp.R1 = build(static_cast<int>(in_rhs.size()), dim, in);
    qp.r1 = Eigen::Map<Eigen::VectorXd>(in_rhs.data(), static_cast<Eigen::Index>(in_rhs.size()));

    // Objective.
    std::vector<Triplet> diag;
    for (int k = 1; k <= N; ++k) {
        for (int i = 0; i < n; ++i) {
            const bool counted = objective == MpcObjective::Augmented || net.is_controlled(i);
            if (counted) diag.emplace_back(L.alpha(k, i), L.alpha(k, i), 2.0 * cfg.cost_weight[i]);
        }
        for (int p = 0; p < L.n_safe; ++p)
            diag.emplace_back(L.s(k, p), L.s(k, p), 2.0 * cfg.violation_weight[net.safety[p]]);
    }
    SparseMatrix h = build(dim, dim, diag);
    qp.f = Eigen::VectorXd::Zero(dim);
    if (objective == MpcObjective::Augmented) {
        std::vector<Triplet> init;
        for (int r = 0; r < blk; ++r) init.emplace_back(r, L.state(1, r), 1.0);
        const SparseMatrix phi = build(n_dyn, dim, dyn);
        const SparseMatrix e1 = build(blk, dim, init);
        const SparseMatrix phit = phi.transpose();
        const SparseMatrix e1t = e1.transpose();
        SparseMatrix quad = phit * phi;
        SparseMatrix quad0 = e1t * e1;
        h = h + 2.0 * quad + 2.0 * quad0;
        qp.f = -2.0 * (phit * dyn_rhs + e1t * x0);
        qp.constant = dyn_rhs.squaredNorm() + x0.squaredNorm();
    }
    h.prune(0.0);
    h.makeCompressed();
    qp.H = h;

    const long want_r1 = 2L * L.n_safe * N + 2L * static_cast<long>(net.controlled.size());
    const long want_r2 = static_cast<long>(blk) * N + n - static_cast<long>(net.controlled.size());
    const long want_dim = static_cast<long>(blk + L.n_safe) * N + n;
    if (qp.R1.rows() != want_r1 || qp.R2.rows() != want_r2 || dim != want_dim)
        throw DimensionMismatch("assembled MPC program has unexpected dimensions");
    check_dimensions(qp);
    return qp;
}

std::vector<Eigen::VectorXd> make_forecast(const PowerNetwork& net, const DisturbanceProfile& dist,
                                           ForecastMode mode, double t_sample, double step,
                                           int horizon) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(horizon);
    for (int k = 1; k <= horizon; ++k) {
        const double t = mode == ForecastMode::Perfect ? t_sample + (k - 1) * step : t_sample;
        out.push_back(injection_at(net, dist, t));
    }
    return out;
}

Eigen::VectorXd mpc_control(const MpcLayout& layout, const Eigen::VectorXd& y) {
    if (y.size() != layout.dim()) throw DimensionMismatch("solution vector has the wrong size");
    return y.segment(layout.u(0), layout.n);
}

} // namespace swingsafe

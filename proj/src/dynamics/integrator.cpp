#include "swingsafe/dynamics.hpp"

#include "swingsafe/errors.hpp"

#include <cmath>

namespace swingsafe {
namespace {

// Root of E*omega + w - top_layer(omega, E*omega + w) = 0. The left side is
// increasing in omega and the top layer vanishes at omega = 0, so the root
// lies between 0 and -w/E.
double solve_balance(const ControlLaw& law, int bus, double e, double w) {
    const double free_omega = -w / e;
    auto phi = [&](double om) { return e * om + w - law.top_layer(bus, om, e * om + w); };
    if (phi(free_omega) == 0.0) return free_omega;
    double lo = std::min(0.0, free_omega);
    double hi = std::max(0.0, free_omega);
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (phi(mid) > 0.0) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

StageEval evaluate_stage(const PowerNetwork& net, const DisturbanceProfile& dist,
                         const ControlLaw& law, double t, const SystemState& state) {
    const int n = net.n_buses();
    const bool bottom = law.bottom_layer_enabled();
    StageEval e;
    e.p = injection_at(net, dist, t);
    e.alpha_bl = bottom ? state.alpha_bl : Eigen::VectorXd::Zero(n);
    e.omega = state.omega;
    e.alpha_tl = Eigen::VectorXd::Zero(n);
    e.u_hat = Eigen::VectorXd::Zero(n);

    const Eigen::VectorXd outflow = bus_outflow(net, state.lambda);
    for (int i = 0; i < n; ++i) {
        const double w = outflow[i] - e.p[i] - e.alpha_bl[i];
        if (!net.has_inertia(i)) {
            e.omega[i] = net.is_safety(i) ? solve_balance(law, i, net.damping[i], w)
                                          : -w / net.damping[i];
        }
        if (net.is_safety(i)) {
            const double v = net.damping[i] * e.omega[i] + w;
            e.alpha_tl[i] = law.top_layer(i, e.omega[i], v);
        }
    }
    e.alpha = e.alpha_bl + e.alpha_tl;

    SystemState full{state.lambda, e.omega, e.alpha_bl};
    e.rates = swing_rhs(net, full, {e.alpha, e.p});

    e.alpha_bl_dot = Eigen::VectorXd::Zero(n);
    if (bottom) {
        for (int i : net.controlled) {
            e.u_hat[i] = law.filtered_mpc(i, e.alpha_bl[i]);
            e.alpha_bl_dot[i] = -e.alpha_bl[i] / law.filter_tau(i) - e.omega[i] + e.u_hat[i];
        }
    }
    return e;
}

StateLayout::StateLayout(const PowerNetwork& net)
    : n_(net.n_buses()), m_(net.n_lines()), controlled_(net.controlled) {
    for (int i = 0; i < n_; ++i) (net.has_inertia(i) ? inertial_ : algebraic_).push_back(i);
    size_ = m_ + static_cast<int>(inertial_.size() + controlled_.size());
}

std::vector<double> StateLayout::pack(const SystemState& s) const {
    std::vector<double> y;
    y.reserve(size_);
    for (int k = 0; k < m_; ++k) y.push_back(s.lambda[k]);
    for (int i : inertial_) y.push_back(s.omega[i]);
    for (int i : controlled_) y.push_back(s.alpha_bl[i]);
    return y;
}

SystemState StateLayout::unpack(const std::vector<double>& y) const {
    SystemState s{Eigen::VectorXd(m_), Eigen::VectorXd::Zero(n_), Eigen::VectorXd::Zero(n_)};
    std::size_t p = 0;
    for (int k = 0; k < m_; ++k) s.lambda[k] = y[p++];
    for (int i : inertial_) s.omega[i] = y[p++];
    for (int i : controlled_) s.alpha_bl[i] = y[p++];
    return s;
}

std::vector<double> StateLayout::pack_rates(const StageEval& e) const {
    std::vector<double> y;
    y.reserve(size_);
    for (int k = 0; k < m_; ++k) y.push_back(e.rates.lambda_dot[k]);
    for (int i : inertial_) y.push_back(e.rates.omega_dot[i]);
    for (int i : controlled_) y.push_back(e.alpha_bl_dot[i]);
    return y;
}

SystemState integrate_step(const PowerNetwork& net, const DisturbanceProfile& dist,
                           const ControlLaw& law, const SystemState& state, double t, double dt) {
    if (!(dt > 0.0)) throw PreconditionError("integration step must be positive");
    const StateLayout layout(net);
    auto rhs = [&](double ts, const std::vector<double>& y) {
        return layout.pack_rates(evaluate_stage(net, dist, law, ts, layout.unpack(y)));
    };
    const std::vector<double> y1 = rk4_step(rhs, t, layout.pack(state), dt);
    for (double v : y1)
        if (!std::isfinite(v)) throw NonFinite("state became non-finite at t = " + std::to_string(t));
    SystemState next = layout.unpack(y1);
    if (!law.bottom_layer_enabled()) next.alpha_bl = state.alpha_bl;
    const StageEval end = evaluate_stage(net, dist, law, t + dt, next);
    next.omega = end.omega;
    return next;
}

} // namespace swingsafe

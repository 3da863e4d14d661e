#include "swingsafe/simulate.hpp"

#include "swingsafe/errors.hpp"

#include <chrono>
#include <cmath>

namespace swingsafe {
namespace {

long steps_in(double span, double dt, const char* what) {
    const double q = span / dt;
    const long k = std::lround(q);
    if (std::abs(q - static_cast<double>(k)) > 1e-6 * std::max(1.0, q))
        throw ConfigError(std::string(what) + " is not a multiple of dt");
    return k;
}

void append(std::vector<double>& dst, const Eigen::VectorXd& v) {
    dst.insert(dst.end(), v.data(), v.data() + v.size());
}

} // namespace

SimulationResult simulate(const PowerNetwork& net, const ScenarioConfig& sc, ControlLaw& law) {
    validate(sc, net);
    const auto wall0 = std::chrono::steady_clock::now();
    const int n = net.n_buses();
    const long steps = steps_in(sc.t_end, sc.dt, "t_end");
    const long sample_every = steps_in(sc.controller.sampling_period, sc.dt, "sampling period");
    const long stride = std::max(1, sc.output_stride);
    const DisturbanceProfile& dist = sc.disturbance;

    SimulationResult out;
    out.lambda_eq = compute_equilibrium(net, injection_at(net, dist, 0.0));
    SystemState x = equilibrium_state(net, out.lambda_eq);
    if (sc.omega0) x.omega = *sc.omega0;
    if (sc.alpha_bl0) x.alpha_bl = *sc.alpha_bl0;
    for (int i = 0; i < n; ++i)
        if (!net.is_controlled(i)) x.alpha_bl[i] = 0.0;

    Trajectory& tr = out.trajectory;
    tr.n = n;
    tr.m = net.n_lines();
    tr.controlled = net.controlled;
    tr.safety = net.safety;
    tr.controller_start = sc.controller_start;
    const std::size_t rows = static_cast<std::size_t>(steps / stride + 2);
    for (auto* v : {&tr.omega, &tr.alpha_bl, &tr.alpha_tl, &tr.alpha, &tr.u_hat, &tr.u_mpc, &tr.p})
        v->reserve(rows * n);
    tr.lambda.reserve(rows * tr.m);

    const auto* bilayer = dynamic_cast<const BilayerController*>(&law);
    const StateLayout layout(net);
    const bool has_algebraic = !layout.algebraic().empty();

    for (long k = 0;; ++k) {
        const double t = static_cast<double>(k) * sc.dt;
        law.on_step(t, x, dist, k % sample_every == 0);
        if (has_algebraic) x.omega = evaluate_stage(net, dist, law, t, x).omega;
        if (k % stride == 0 || k == steps) {
            const StageEval e = evaluate_stage(net, dist, law, t, x);
            tr.t.push_back(t);
            append(tr.lambda, x.lambda);
            append(tr.omega, e.omega);
            append(tr.alpha_bl, e.alpha_bl);
            append(tr.alpha_tl, e.alpha_tl);
            append(tr.alpha, e.alpha);
            append(tr.u_hat, e.u_hat);
            Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
            if (bilayer && law.bottom_layer_enabled())
                for (int i : net.controlled) u[i] = bilayer->applied_mpc(i);
            append(tr.u_mpc, u);
            append(tr.p, e.p);
            const SystemState xs{x.lambda, e.omega, e.alpha_bl};
            tr.V.push_back(energy_V(net, out.lambda_eq, xs));
            tr.Vbar.push_back(energy_Vbar(net, out.lambda_eq, xs));
            tr.vbar_rate.push_back(vbar_rate(net, out.lambda_eq, xs, e));
            tr.dissipation_bound.push_back(dissipation_bound(net, sc.controller, e));
        }
        if (k == steps) break;
        x = integrate_step(net, dist, law, x, t, sc.dt);
    }
    if (bilayer && bilayer->mpc()) out.samples = bilayer->mpc()->history();
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return out;
}

SimulationResult simulate(const PowerNetwork& net, const ScenarioConfig& sc) {
    BilayerController law(net, sc);
    return simulate(net, sc, law);
}

} // namespace swingsafe

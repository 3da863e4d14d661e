#include "swingsafe/dynamics.hpp"

#include "swingsafe/errors.hpp"

#include <cmath>

namespace swingsafe {

SwingRates swing_rhs(const PowerNetwork& net, const SystemState& state, const InputSignal& input) {
    const int n = net.n_buses();
    for (int i = 0; i < n; ++i)
        if (input.alpha[i] != 0.0 && !net.is_controlled(i))
            throw PreconditionError("control input is nonzero on uncontrolled bus " +
                                    std::to_string(i));
    SwingRates r;
    r.lambda_dot.resize(net.n_lines());
    for (int k = 0; k < net.n_lines(); ++k)
        r.lambda_dot[k] = state.omega[net.lines[k].pos] - state.omega[net.lines[k].neg];
    const Eigen::VectorXd out = bus_outflow(net, state.lambda);
    r.omega_dot = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        if (!net.has_inertia(i)) continue;
        r.omega_dot[i] = (-net.damping[i] * state.omega[i] - out[i] + input.p[i] + input.alpha[i]) /
                         net.inertia[i];
    }
    return r;
}

double algebraic_omega(const PowerNetwork& net, const Eigen::VectorXd& lambda,
                       const InputSignal& input, int bus) {
    if (net.has_inertia(bus))
        throw PreconditionError("algebraic_omega called on a bus with positive inertia");
    double out = 0.0;
    for (int k = 0; k < net.n_lines(); ++k) {
        const auto& l = net.lines[k];
        const double flow = l.susceptance * std::sin(lambda[k]);
        if (l.pos == bus) out += flow;
        if (l.neg == bus) out -= flow;
    }
    return (-out + input.p[bus] + input.alpha[bus]) / net.damping[bus];
}

double ControlLaw::top_layer(int, double, double) const { return 0.0; }
double ControlLaw::filtered_mpc(int, double) const { return 0.0; }
bool ControlLaw::bottom_layer_enabled() const { return false; }
double ControlLaw::filter_tau(int) const { return 1.0; }
void ControlLaw::on_step(double, const SystemState&, const DisturbanceProfile&, bool) {}

SystemState equilibrium_state(const PowerNetwork& net, const Eigen::VectorXd& lambda_eq) {
    return {lambda_eq, Eigen::VectorXd::Zero(net.n_buses()), Eigen::VectorXd::Zero(net.n_buses())};
}

} // namespace swingsafe

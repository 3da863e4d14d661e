#include "swingsafe/monitor.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace swingsafe {

double line_potential(double lambda, double lambda_eq) {
    const double s = std::sin(lambda_eq);
    return std::cos(lambda_eq) - std::cos(lambda) - lambda * s + lambda_eq * s;
}

double energy_V(const PowerNetwork& net, const Eigen::VectorXd& lambda_eq, const SystemState& x) {
    double kinetic = 0.0;
    for (int i = 0; i < net.n_buses(); ++i)
        if (net.has_inertia(i)) kinetic += net.inertia[i] * x.omega[i] * x.omega[i];
    double potential = 0.0;
    for (int k = 0; k < net.n_lines(); ++k)
        potential += net.lines[k].susceptance * line_potential(x.lambda[k], lambda_eq[k]);
    return 0.5 * kinetic + potential;
}

double energy_Vbar(const PowerNetwork& net, const Eigen::VectorXd& lambda_eq, const SystemState& x) {
    double filter = 0.0;
    for (int i : net.controlled) filter += x.alpha_bl[i] * x.alpha_bl[i];
    return energy_V(net, lambda_eq, x) + 0.5 * filter;
}

double level_set_constant(const PowerNetwork& net, const Eigen::VectorXd& lambda_eq) {
    double c = std::numeric_limits<double>::infinity();
    for (int k = 0; k < net.n_lines(); ++k)
        for (double face : {std::numbers::pi / 2, -std::numbers::pi / 2})
            c = std::min(c, net.lines[k].susceptance * line_potential(face, lambda_eq[k]));
    return c;
}

EnergyReport energy_report(const PowerNetwork& net, const Eigen::VectorXd& lambda_eq,
                           const SystemState& x) {
    EnergyReport r;
    r.V = energy_V(net, lambda_eq, x);
    r.Vbar = energy_Vbar(net, lambda_eq, x);
    r.c = level_set_constant(net, lambda_eq);
    r.rho_hat = r.Vbar / r.c;
    const bool in_box = x.lambda.size() == 0 || x.lambda.cwiseAbs().maxCoeff() < std::numbers::pi / 2;
    r.in_level_set = in_box && r.rho_hat <= 1.0;
    return r;
}

double vbar_rate(const PowerNetwork& net, const Eigen::VectorXd& lambda_eq, const SystemState& x,
                 const StageEval& e) {
    double rate = 0.0;
    for (int i = 0; i < net.n_buses(); ++i)
        if (net.has_inertia(i)) rate += net.inertia[i] * e.omega[i] * e.rates.omega_dot[i];
    for (int k = 0; k < net.n_lines(); ++k)
        rate += net.lines[k].susceptance * (std::sin(x.lambda[k]) - std::sin(lambda_eq[k])) *
                e.rates.lambda_dot[k];
    for (int i : net.controlled) rate += e.alpha_bl[i] * e.alpha_bl_dot[i];
    return rate;
}

double dissipation_bound(const PowerNetwork& net, const ControllerConfig& cfg, const StageEval& e) {
    double b = 0.0;
    for (int i = 0; i < net.n_buses(); ++i) b -= net.damping[i] * e.omega[i] * e.omega[i];
    for (int i : net.controlled)
        b -= (1.0 / cfg.tau[i] - cfg.epsilon[i]) * e.alpha_bl[i] * e.alpha_bl[i];
    return b;
}

} // namespace swingsafe

#include "swingsafe/config.hpp"

#include "swingsafe/errors.hpp"

#include <cmath>

namespace swingsafe {

int ControllerConfig::horizon_steps() const {
    return static_cast<int>(std::ceil(horizon / step - 1e-9));
}

ControllerConfig ControllerConfig::defaults(const PowerNetwork& net) {
    const int n = net.n_buses();
    ControllerConfig c;
    c.omega_min = Eigen::VectorXd::Constant(n, hz_to_rad(-0.2));
    c.omega_max = Eigen::VectorXd::Constant(n, hz_to_rad(0.2));
    c.omega_min_thr = Eigen::VectorXd::Constant(n, hz_to_rad(-0.1));
    c.omega_max_thr = Eigen::VectorXd::Constant(n, hz_to_rad(0.1));
    c.gamma_min = Eigen::VectorXd::Ones(n);
    c.gamma_max = Eigen::VectorXd::Ones(n);
    c.epsilon = Eigen::VectorXd::Constant(n, 1.9);
    c.tau = Eigen::VectorXd::Constant(n, 0.5);
    c.cost_weight = Eigen::VectorXd::Ones(n);
    for (int i : net.safety) c.cost_weight[i] = 4.0;
    c.violation_weight = Eigen::VectorXd::Constant(n, 100.0);
    return c;
}

void validate(const ControllerConfig& cfg, const PowerNetwork& net) {
    const Eigen::Index n = net.n_buses();
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    for (const Eigen::VectorXd* v :
         {&cfg.omega_min, &cfg.omega_max, &cfg.omega_min_thr, &cfg.omega_max_thr, &cfg.gamma_min,
          &cfg.gamma_max, &cfg.epsilon, &cfg.tau, &cfg.cost_weight, &cfg.violation_weight})
        if (v->size() != n) fail("controller parameter vector has wrong length");
    if (!(cfg.horizon > 0.0) || !(cfg.step > 0.0) || !(cfg.sampling_period > 0.0))
        fail("horizon, prediction step and sampling period must be positive");
    for (int i = 0; i < n; ++i)
        if (!(cfg.cost_weight[i] > 0.0)) fail("cost weights c_i must be positive");
    for (int i : net.controlled) {
        if (!(cfg.epsilon[i] > 0.0) || !(cfg.tau[i] > 0.0))
            fail("epsilon and tau must be positive on controlled buses");
        if (!(cfg.epsilon[i] * cfg.tau[i] < 1.0))
            fail("epsilon_i * tau_i must be below 1 on every controlled bus");
    }
    for (int i : net.safety) {
        if (!(cfg.omega_min[i] < cfg.omega_min_thr[i] && cfg.omega_min_thr[i] < 0.0 &&
              0.0 < cfg.omega_max_thr[i] && cfg.omega_max_thr[i] < cfg.omega_max[i]))
            fail("safety band must satisfy lower < lower_thr < 0 < upper_thr < upper");
        if (!(cfg.gamma_min[i] > 0.0) || !(cfg.gamma_max[i] > 0.0))
            fail("barrier gains must be positive");
        if (!(cfg.violation_weight[i] > 0.0)) fail("violation weights d_i must be positive");
    }
}

std::string to_string(ControlMode m) {
    switch (m) {
    case ControlMode::OpenLoop: return "open-loop";
    case ControlMode::TopOnly: return "top-only";
    case ControlMode::Bilayered: return "bilayered";
    case ControlMode::BilayeredShift: return "bilayered+shift";
    }
    return "?";
}

std::string to_string(SolverBackend b) {
    switch (b) {
    case SolverBackend::Reference: return "reference";
    case SolverBackend::SaddleCentral: return "saddle-central";
    case SolverBackend::SaddleDistributed: return "saddle-distributed";
    }
    return "?";
}

ControlMode parse_control_mode(const std::string& s) {
    if (s == "open-loop") return ControlMode::OpenLoop;
    if (s == "top-only") return ControlMode::TopOnly;
    if (s == "bilayered") return ControlMode::Bilayered;
    if (s == "bilayered+shift" || s == "bilayered-shift" || s == "shift") return ControlMode::BilayeredShift;
    throw ConfigError("unknown controller mode '" + s +
                      "' (expected open-loop, top-only, bilayered, bilayered+shift)");
}

SolverBackend parse_backend(const std::string& s) {
    if (s == "reference") return SolverBackend::Reference;
    if (s == "saddle-central") return SolverBackend::SaddleCentral;
    if (s == "saddle-distributed") return SolverBackend::SaddleDistributed;
    throw ConfigError("unknown solver backend '" + s +
                      "' (expected reference, saddle-central, saddle-distributed)");
}

void validate(const ScenarioConfig& sc, const PowerNetwork& net) {
    validate(sc.controller, net);
    if (!(sc.t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (!(sc.dt > 0.0)) throw ConfigError("dt must be positive");
    if (sc.output_stride < 1) throw ConfigError("output_stride must be at least 1");
    const double ratio = sc.controller.sampling_period / sc.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw ConfigError("dt must divide the MPC sampling period");
    const double start_ratio = sc.controller_start / sc.dt;
    if (sc.controller_start < 0.0 || std::abs(start_ratio - std::round(start_ratio)) > 1e-6)
        throw ConfigError("controller_start must be a nonnegative multiple of dt");
    for (int i : sc.disturbance.buses)
        if (i < 0 || i >= net.n_buses()) throw ConfigError("disturbance bus out of range");
    if (sc.omega0 && sc.omega0->size() != net.n_buses())
        throw ConfigError("initial frequency vector has wrong length");
    if (sc.alpha_bl0) {
        if (sc.alpha_bl0->size() != net.n_buses())
            throw ConfigError("initial filter state vector has wrong length");
        for (int i = 0; i < net.n_buses(); ++i)
            if (!net.is_controlled(i) && (*sc.alpha_bl0)[i] != 0.0)
                throw ConfigError("initial filter state must be zero outside the controlled set");
    }
}

} // namespace swingsafe

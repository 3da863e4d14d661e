#pragma once

// Shared helpers for the unit and acceptance tests.

#include "swingsafe/case_file.hpp"
#include "swingsafe/linear_model.hpp"
#include "swingsafe/mpc_qp.hpp"
#include "swingsafe/network.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace swingsafe::testing {

inline std::filesystem::path case_path(const std::string& name) {
    return std::filesystem::path(SWINGSAFE_CASE_DIR) / name;
}

inline CaseData load_fixture(const std::string& name) { return load_case(case_path(name)); }

/// Ring of n buses plus a few random chords. Positive inertia everywhere
/// except possibly bus n-1, balanced injections, a nonempty I_omega inside I_u.
inline PowerNetwork random_network(int n, std::uint64_t seed, bool zero_inertia_bus = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    PowerNetwork net;
    net.inertia.resize(n);
    net.damping.resize(n);
    net.injection.resize(n);
    for (int i = 0; i < n; ++i) {
        net.labels.push_back(i + 1);
        net.inertia[i] = 0.1 + 0.9 * u01(rng);
        net.damping[i] = 0.1 + 0.4 * u01(rng);
        net.injection[i] = 2.0 * u01(rng) - 1.0;
    }
    if (zero_inertia_bus && n > 2) net.inertia[n - 1] = 0.0;
    net.injection.array() -= net.injection.mean();
    auto add = [&](int a, int b) { net.lines.push_back({a, b, 5.0 + 15.0 * u01(rng)}); };
    if (n == 2) {
        add(0, 1);
    } else {
        for (int i = 0; i < n; ++i) add(i, (i + 1) % n);
        if (n > 4) add(0, n / 2);
    }
    for (int i = 0; i < n; ++i)
        if (net.has_inertia(i) && (i == 0 || u01(rng) < 0.6)) net.controlled.push_back(i);
    net.safety.push_back(net.controlled.front());
    if (net.controlled.size() > 1 && u01(rng) < 0.5) net.safety.push_back(net.controlled[1]);
    validate(net);
    return net;
}

struct QpCase {
    PowerNetwork net;
    ControllerConfig cfg;
    QpInstance qp;
};

/// MPC program at a perturbed state of a random network.
inline QpCase random_mpc_case(std::uint64_t seed, MpcObjective objective = MpcObjective::Augmented,
                              int max_buses = 6, int max_horizon = 10) {
    std::mt19937_64 rng(seed * 7919 + 13);
    const int n = std::uniform_int_distribution<int>(2, max_buses)(rng);
    const int horizon = std::uniform_int_distribution<int>(2, max_horizon)(rng);
    QpCase c{random_network(n, seed), {}, {}};
    c.cfg = ControllerConfig::defaults(c.net);
    c.cfg.step = 0.2;
    c.cfg.horizon = 0.2 * horizon;
    std::uniform_real_distribution<double> pert(-1.5, 1.5);
    SystemState x = equilibrium_state(c.net, compute_equilibrium(c.net));
    for (int i = 0; i < n; ++i) x.omega[i] = pert(rng);
    for (int i : c.net.controlled) x.alpha_bl[i] = 0.3 * pert(rng);
    const DiscreteModel dm = discretize_backward_euler(linearize(c.net, c.cfg.tau), c.cfg.step, horizon);
    const std::vector<Eigen::VectorXd> forecast(horizon, c.net.injection);
    c.qp = assemble_mpc_qp(dm, c.net, c.cfg, x, forecast, objective);
    return c;
}

} // namespace swingsafe::testing

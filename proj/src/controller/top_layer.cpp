#include "swingsafe/controller.hpp"

#include <algorithm>

namespace swingsafe {

double top_layer_law(const ControllerConfig& cfg, int bus, double omega, double v) {
    const double hi_thr = cfg.omega_max_thr[bus], lo_thr = cfg.omega_min_thr[bus];
    if (omega > hi_thr) {
        const double barrier = cfg.gamma_max[bus] * (cfg.omega_max[bus] - omega) / (omega - hi_thr);
        return std::min(0.0, barrier + v);
    }
    if (omega < lo_thr) {
        const double barrier = cfg.gamma_min[bus] * (cfg.omega_min[bus] - omega) / (lo_thr - omega);
        return std::max(0.0, barrier + v);
    }
    return 0.0;
}

double top_layer(const PowerNetwork& net, const ControllerConfig& cfg, const SystemState& x,
                 const Eigen::VectorXd& p, int bus) {
    if (!net.is_safety(bus)) return 0.0;
    double outflow = 0.0;
    for (int k : net.incident_lines(bus)) {
        const Line& l = net.lines[k];
        const double flow = l.susceptance * std::sin(x.lambda[k]);
        outflow += l.pos == bus ? flow : -flow;
    }
    const double v = net.damping[bus] * x.omega[bus] + outflow - p[bus] - x.alpha_bl[bus];
    return top_layer_law(cfg, bus, x.omega[bus], v);
}

} // namespace swingsafe

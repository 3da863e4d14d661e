#include "swingsafe/controller.hpp"
#include "swingsafe/errors.hpp"

#include <algorithm>
#include <cmath>

namespace swingsafe {

double stability_filter(double alpha_bl, double u_mpc, double epsilon) {
    const double bound = epsilon * std::abs(alpha_bl);
    return std::clamp(u_mpc, -bound, bound);
}

double lowpass_rhs(bool controlled, double alpha_bl, double omega, double u_hat, double tau) {
    if (!controlled) return 0.0;
    return -alpha_bl / tau - omega + u_hat;
}

Eigen::VectorXd compose_alpha(const PowerNetwork& net, const Eigen::VectorXd& alpha_tl,
                              const Eigen::VectorXd& alpha_bl) {
    if (alpha_tl.size() != net.n_buses() || alpha_bl.size() != net.n_buses())
        throw DimensionMismatch("control vectors must have one entry per bus");
    for (int i = 0; i < net.n_buses(); ++i)
        if (!net.is_controlled(i) && (alpha_tl[i] != 0.0 || alpha_bl[i] != 0.0))
            throw PreconditionError("control is nonzero on uncontrolled bus " + std::to_string(i));
    return alpha_tl + alpha_bl;
}

} // namespace swingsafe

#pragma once

#include "swingsafe/network.hpp"

namespace swingsafe {

/// Linearized prediction model  G x' = A x + B1 p + B2 u  on the augmented
/// state x = (lambda, omega, alpha_BL), laid out as [m | n | n].
struct LinearModel {
    int m = 0;
    int n = 0;
    SparseMatrix G, A, B1, B2;

    int state_dim() const { return m + 2 * n; }
    int omega_index(int bus) const { return m + bus; }
    int alpha_index(int bus) const { return m + n + bus; }
};

/// sin(lambda) ~ lambda around zero. Rows for alpha_BL of uncontrolled buses
/// read 0 = -alpha + u, so together with u_i = 0 they pin alpha_i to zero.
LinearModel linearize(const PowerNetwork& net, const Eigen::VectorXd& tau);

/// F x(k+1) = A x(k) + B1 p(k) + B2 u.
struct DiscreteModel {
    int m = 0;
    int n = 0;
    SparseMatrix F, A, B1, B2;
    double step = 0.0;
    int horizon = 0;

    int state_dim() const { return m + 2 * n; }
};

/// F = G - T A_c, A = G, B_s = T B_s,c. Throws SingularF.
DiscreteModel discretize_backward_euler(const LinearModel& lm, double step, int horizon = 1);

/// F = G, A = G + T A_c, B_s = T B_s,c. Throws SingularG.
DiscreteModel discretize_forward_euler(const LinearModel& lm, double step, int horizon = 1);

struct SpectralCheck {
    double radius = 0.0;
    bool stable = false;
};

/// Spectral radius of F^{-1} A; stable when it is at most 1 + 1e-9.
SpectralCheck spectral_stability_check(const DiscreteModel& dm);

} // namespace swingsafe

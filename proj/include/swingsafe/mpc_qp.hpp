#pragma once

#include "swingsafe/config.hpp"
#include "swingsafe/dynamics.hpp"
#include "swingsafe/linear_model.hpp"
#include "swingsafe/qp.hpp"

#include <vector>

namespace swingsafe {

/// Index map of Y = (x(1), ..., x(N), u, s(1), ..., s(N)).
struct MpcLayout {
    int m = 0, n = 0, horizon = 0, n_safe = 0;

    MpcLayout() = default;
    MpcLayout(const PowerNetwork& net, int horizon);

    int block() const { return m + 2 * n; }
    int state(int k, int idx) const { return (k - 1) * block() + idx; } // k = 1..N
    int lambda(int k, int line) const { return state(k, line); }
    int omega(int k, int bus) const { return state(k, m + bus); }
    int alpha(int k, int bus) const { return state(k, m + n + bus); }
    int u(int bus) const { return horizon * block() + bus; }
    int s(int k, int pos) const { return horizon * block() + n + (k - 1) * n_safe + pos; }
    int dim() const { return (block() + n_safe) * horizon + n; }
};

enum class MpcObjective {
    Augmented, // dynamics residual and initial-state penalties added; H positive definite
    Plain      // control and violation cost only
};

/// Builds the MPC program at a sampling instant. `forecast[k-1]` is the
/// injection expected at t^w + (k-1) T for k = 1..N. Throws DimensionMismatch
/// and PreconditionError.
QpInstance assemble_mpc_qp(const DiscreteModel& dm, const PowerNetwork& net,
                           const ControllerConfig& cfg, const SystemState& sample,
                           const std::vector<Eigen::VectorXd>& forecast,
                           MpcObjective objective = MpcObjective::Augmented);

/// Injection forecast over the horizon for the configured forecast mode.
std::vector<Eigen::VectorXd> make_forecast(const PowerNetwork& net, const DisturbanceProfile& dist,
                                           ForecastMode mode, double t_sample, double step,
                                           int horizon);

/// Extracts u from a solution vector.
Eigen::VectorXd mpc_control(const MpcLayout& layout, const Eigen::VectorXd& y);

} // namespace swingsafe

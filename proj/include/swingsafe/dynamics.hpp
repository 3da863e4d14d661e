#pragma once

#include "swingsafe/disturbance.hpp"
#include "swingsafe/network.hpp"

#include <vector>

namespace swingsafe {

/// Augmented state x = (lambda, omega, alpha_BL). `omega` always has length
/// n; entries of zero-inertia buses are algebraic and kept consistent with
/// the rest of the state by the integrator.
struct SystemState {
    Eigen::VectorXd lambda;
    Eigen::VectorXd omega;
    Eigen::VectorXd alpha_bl;
};

struct InputSignal {
    Eigen::VectorXd alpha; // total control, zero outside I_u
    Eigen::VectorXd p;     // effective injection at the evaluation time
};

struct SwingRates {
    Eigen::VectorXd lambda_dot;
    Eigen::VectorXd omega_dot; // zero on zero-inertia buses
};

/// lambda' = D omega;  M_i omega_i' = -E_i omega_i - [D^T Y_b sin lambda]_i + p_i + alpha_i.
/// Throws PreconditionError if alpha is nonzero outside the controlled set.
SwingRates swing_rhs(const PowerNetwork& net, const SystemState& state, const InputSignal& input);

/// Frequency of a zero-inertia bus from its power balance.
double algebraic_omega(const PowerNetwork& net, const Eigen::VectorXd& lambda,
                       const InputSignal& input, int bus);

/// Real-time feedback consulted by the integrator at every stage.
class ControlLaw {
public:
    virtual ~ControlLaw() = default;
    /// Top-layer term alpha_TL,i for bus i given its frequency and
    /// v_i = E_i omega_i + [D^T Y_b sin lambda]_i - p_i - alpha_BL,i.
    virtual double top_layer(int bus, double omega, double v) const;
    /// Stability-filter output for bus i given the current alpha_BL,i.
    virtual double filtered_mpc(int bus, double alpha_bl) const;
    /// Whether the low-pass filter states evolve.
    virtual bool bottom_layer_enabled() const;
    /// Low-pass filter time constant of bus i.
    virtual double filter_tau(int bus) const;
    /// Called by the simulation loop at the start of every step, before any
    /// stage is evaluated. `sampling_instant` marks the MPC sampling times.
    virtual void on_step(double t, const SystemState& x, const DisturbanceProfile& dist,
                         bool sampling_instant);
};

/// Everything the stage evaluation produces; kept for logging.
struct StageEval {
    Eigen::VectorXd p;
    Eigen::VectorXd omega;
    Eigen::VectorXd alpha_bl;
    Eigen::VectorXd alpha_tl;
    Eigen::VectorXd alpha;
    Eigen::VectorXd u_hat;
    SwingRates rates;
    Eigen::VectorXd alpha_bl_dot;
};

/// Packs the differential part of the state into one vector:
/// [lambda (m) | omega of inertial buses | alpha_BL of controlled buses].
class StateLayout {
public:
    explicit StateLayout(const PowerNetwork& net);
    int size() const { return size_; }
    std::vector<double> pack(const SystemState& s) const;
    /// Unpacks; algebraic omega entries are left at zero.
    SystemState unpack(const std::vector<double>& y) const;
    std::vector<double> pack_rates(const StageEval& e) const;
    const std::vector<int>& inertial() const { return inertial_; }
    const std::vector<int>& algebraic() const { return algebraic_; }

private:
    int n_, m_, size_;
    std::vector<int> inertial_, algebraic_, controlled_;
};

/// Solves the power balance of every zero-inertia bus (with the top-layer
/// term when the law provides one) and evaluates all rates at time t.
StageEval evaluate_stage(const PowerNetwork& net, const DisturbanceProfile& dist,
                         const ControlLaw& law, double t, const SystemState& state);

/// One classical RK4 step; returns the new state with consistent algebraic
/// frequencies. Throws PreconditionError for dt <= 0 and NonFinite.
SystemState integrate_step(const PowerNetwork& net, const DisturbanceProfile& dist,
                           const ControlLaw& law, const SystemState& state, double t, double dt);

/// Generic RK4 step on a packed vector; exposed for testing against closed forms.
template <class Rhs>
std::vector<double> rk4_step(const Rhs& rhs, double t, const std::vector<double>& y, double dt);

SystemState equilibrium_state(const PowerNetwork& net, const Eigen::VectorXd& lambda_eq);

} // namespace swingsafe

#include "swingsafe/detail/rk4.hpp"

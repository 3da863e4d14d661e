#pragma once

#include "swingsafe/config.hpp"
#include "swingsafe/dynamics.hpp"
#include "swingsafe/errors.hpp"
#include "swingsafe/trajectory.hpp"

#include <string>
#include <vector>

namespace swingsafe {

/// a(lambda) = cos(lambda_eq) - cos(lambda) - lambda sin(lambda_eq) + lambda_eq sin(lambda_eq).
double line_potential(double lambda, double lambda_eq);

/// 1/2 sum_{M_i > 0} M_i omega_i^2 + sum_j b_j a(lambda_j).
double energy_V(const PowerNetwork& net, const Eigen::VectorXd& lambda_eq, const SystemState& x);

/// V + 1/2 sum_{i in I_u} alpha_BL,i^2.
double energy_Vbar(const PowerNetwork& net, const Eigen::VectorXd& lambda_eq, const SystemState& x);

/// Smallest Vbar on the boundary of the angle box |lambda_j| <= pi/2 with
/// zero frequency and filter states: min over lines and signs of b_k a(+-pi/2).
double level_set_constant(const PowerNetwork& net, const Eigen::VectorXd& lambda_eq);

struct EnergyReport {
    double V = 0.0;
    double Vbar = 0.0;
    bool in_level_set = false; // |lambda| < pi/2 and Vbar <= c
    double rho_hat = 0.0;      // Vbar / c
    double c = 0.0;
};

EnergyReport energy_report(const PowerNetwork& net, const Eigen::VectorXd& lambda_eq,
                           const SystemState& x);

/// d/dt Vbar along the closed-loop vector field at one stage.
double vbar_rate(const PowerNetwork& net, const Eigen::VectorXd& lambda_eq, const SystemState& x,
                 const StageEval& e);

/// Right-hand side of the dissipation inequality for Vbar.
double dissipation_bound(const PowerNetwork& net, const ControllerConfig& cfg, const StageEval& e);

class AuditFailure : public Error {
public:
    using Error::Error;
};

struct LyapunovReport {
    bool pass = true;
    long steps = 0;
    double worst_increase = 0.0;   // max of dVbar / (dt (1 + |Vbar|))
    double worst_bound_excess = 0.0; // max of rate - bound
    std::vector<int> offending_rows;  // first few
};

/// Per logged step: Vbar(t+dt) - Vbar(t) <= tol dt (1 + |Vbar(t)|), and the
/// instantaneous rate stays below the dissipation bound plus `slack`. Rows
/// before `t_from` are skipped.
LyapunovReport lyapunov_decrease_audit(const Trajectory& traj, double tol = 1e-8, double slack = 1e-6,
                                       double t_from = 0.0);

/// Throws AuditFailure listing the offending steps.
void require_pass(const LyapunovReport& r);

struct BusSafety {
    int bus = 0;
    double min_hz = 0.0, max_hz = 0.0;
    double overshoot_hz = 0.0;     // largest excursion beyond the band
    bool unsafe_at_start = false;  // outside the band when the controller starts
    double entry_time = -1.0;      // first time back inside, -1 if never
    bool monotone = true;          // distance to the band never grew before entry
    double worst_growth_hz = 0.0;
};

struct SafetyReport {
    std::vector<BusSafety> buses;
    double worst_overshoot_hz = 0.0;
    bool pass(double tolerance_hz) const;
};

/// Excursions beyond [omega_min, omega_max] on I_omega, and for buses that
/// are unsafe when the controller starts, the monotone approach check.
SafetyReport safety_audit(const Trajectory& traj, const ControllerConfig& cfg,
                          double monotone_tolerance_hz = 1e-9);

struct InvariantReport {
    bool pass = true;
    double worst_filter_excess = 0.0; // max of alpha_BL u_hat - eps alpha_BL^2
    double worst_sign = 0.0;          // max of omega alpha_TL
};

/// Stability-filter inequality and top-layer sign property at every row.
InvariantReport invariant_audit(const Trajectory& traj, const ControllerConfig& cfg,
                                double filter_tolerance = 1e-12);

struct ConvergenceReport {
    double omega_end = 0.0, omega_peak = 0.0;
    double alpha_bl_end = 0.0, alpha_bl_peak = 0.0;
    double u_hat_end = 0.0, u_hat_peak = 0.0;
    double u_mpc_end = 0.0, u_mpc_peak = 0.0;
    bool pass(double ratio) const;
};

ConvergenceReport convergence_report(const Trajectory& traj);

/// Trapezoidal integral of sum_{i in I_u} c_i alpha_i^2 over [t0, t1].
double control_cost(const Trajectory& traj, const Eigen::VectorXd& c, double t0, double t1);
double control_cost(const Trajectory& traj, const Eigen::VectorXd& c);

} // namespace swingsafe

#pragma once

#include "swingsafe/disturbance.hpp"
#include "swingsafe/network.hpp"

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

namespace swingsafe {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline double hz_to_rad(double hz) { return kTwoPi * hz; }
inline double rad_to_hz(double rad) { return rad / kTwoPi; }

/// Controller parameters. Per-bus vectors have length n; entries outside the
/// set a parameter belongs to are ignored. Frequencies are in rad/s.
struct ControllerConfig {
    Eigen::VectorXd omega_min, omega_max;         // safe band, I_omega
    Eigen::VectorXd omega_min_thr, omega_max_thr; // activation thresholds, I_omega
    Eigen::VectorXd gamma_min, gamma_max;         // barrier gains, I_omega
    Eigen::VectorXd epsilon;                      // stability filter slope, I_u
    Eigen::VectorXd tau;                          // low-pass time constant, I_u
    Eigen::VectorXd cost_weight;                  // c_i, every bus
    Eigen::VectorXd violation_weight;             // d_i, I_omega
    double horizon = 10.0;         // seconds
    double step = 0.2;             // prediction step T
    double sampling_period = 1.0;  // t^w = w * sampling_period
    ForecastMode forecast = ForecastMode::Perfect;

    int horizon_steps() const;

    /// Defaults: +-0.2 Hz band, +-0.1 Hz thresholds, gamma 1, epsilon 1.9,
    /// tau 0.5 s, c = 4 on I_omega and 1 elsewhere, d = 100, 10 s horizon,
    /// T = 0.2 s, one sample per second.
    static ControllerConfig defaults(const PowerNetwork& net);
};

/// Throws ConfigError when orderings or positivity requirements fail.
void validate(const ControllerConfig& cfg, const PowerNetwork& net);

struct SaddleGains {
    double primal = 5e-4;
    double ineq = 2.5e-4;
    double eq = 2.5e-4;
};

struct SaddleOptions {
    double step = 1e-3;          // explicit Euler step h in saddle time
    bool limit_step = true;      // clamp h to the estimated stability bound
    SaddleGains gains;
    long max_rounds = 200000;
    double kkt_tol = 1e-6;
    double divergence_factor = 1e6;
    long trace_every = 0;        // 0 disables the convergence trace
    long check_every = 25;       // rounds between stopping-rule evaluations
    bool require_convergence = true; // throw NoConvergence when the budget runs out
};

enum class ControlMode { OpenLoop, TopOnly, Bilayered, BilayeredShift };
enum class SolverBackend { Reference, SaddleCentral, SaddleDistributed };

std::string to_string(ControlMode m);
std::string to_string(SolverBackend b);
ControlMode parse_control_mode(const std::string& s);
SolverBackend parse_backend(const std::string& s);

struct ScenarioConfig {
    DisturbanceProfile disturbance;
    ControllerConfig controller;
    ControlMode mode = ControlMode::Bilayered;
    double shift = 0.1;              // added to u_MPC in BilayeredShift mode
    SolverBackend backend = SolverBackend::Reference;
    SaddleOptions saddle;
    double t_end = 180.0;
    double dt = 1e-3;
    int output_stride = 10;          // integrator steps per CSV row
    double controller_start = 0.0;   // control is zero before this time
    std::optional<Eigen::VectorXd> omega0;    // rad/s, defaults to zero
    std::optional<Eigen::VectorXd> alpha_bl0; // defaults to zero
    std::uint64_t seed = 0;
};

void validate(const ScenarioConfig& sc, const PowerNetwork& net);

} // namespace swingsafe

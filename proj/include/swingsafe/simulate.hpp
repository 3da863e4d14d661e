#pragma once

#include "swingsafe/case_file.hpp"
#include "swingsafe/controller.hpp"
#include "swingsafe/locality.hpp"
#include "swingsafe/monitor.hpp"
#include "swingsafe/trajectory.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace swingsafe {

struct SimulationResult {
    Trajectory trajectory;
    Eigen::VectorXd lambda_eq; // equilibrium of the injection at t = 0
    std::vector<MpcSampleRecord> samples;
    double wall_seconds = 0.0;
};

/// Fixed-step RK4 run of the scenario from the equilibrium of p(0), with the
/// initial frequencies and filter states taken from the scenario. Logs every
/// `output_stride` steps plus the final step. Propagates NonFinite.
SimulationResult simulate(const PowerNetwork& net, const ScenarioConfig& sc, ControlLaw& law);

/// Builds the controller for sc.mode (none for open loop) and runs it.
SimulationResult simulate(const PowerNetwork& net, const ScenarioConfig& sc);

enum class Audit { Safety, Lyapunov, Locality };

/// Parses "safety", "lyapunov", "locality" or "all".
std::vector<Audit> parse_audits(const std::vector<std::string>& names);

struct AuditSummary {
    bool requested = false;
    bool pass = true;
    std::string detail;
};

struct RunReport {
    std::string case_name;
    ControlMode mode = ControlMode::Bilayered;
    SolverBackend backend = SolverBackend::Reference;
    double cost = 0.0;
    double min_hz = 0.0, max_hz = 0.0;
    double settling_time = 0.0; // last time any |omega| exceeded 1 mHz
    SafetyReport safety;
    InvariantReport invariants;
    std::optional<LyapunovReport> lyapunov;
    std::optional<LocalityReport> locality;
    ConvergenceReport convergence;
    AuditSummary safety_audit, lyapunov_audit, locality_audit;
    double wall_seconds = 0.0;

    bool audits_pass() const;
};

/// Runs a scenario and evaluates the requested audits. The Lyapunov audit
/// is only meaningful for constant injections and is reported as such.
RunReport run_scenario(const CaseData& data, const ScenarioConfig& sc, const std::vector<Audit>& audits,
                       SimulationResult* keep = nullptr);

/// Locality certificate of the MPC program at the scenario's initial state.
LocalityReport scenario_locality(const PowerNetwork& net, const ScenarioConfig& sc);

/// MPC program at t = 0 for the scenario.
QpInstance scenario_program(const PowerNetwork& net, const ScenarioConfig& sc);

// Output files.

/// t, omega_hz_<id> (I_omega), alpha_<id>, alpha_tl_<id>, alpha_bl_<id> (I_u),
/// vbar, unsafe_<id> (I_omega).
void write_trajectory_csv(std::ostream& os, const PowerNetwork& net, const Trajectory& traj,
                          const ControllerConfig& cfg);
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);
void write_report_text(std::ostream& os, const RunReport& r);
void write_report_json(std::ostream& os, const RunReport& r);

struct Comparison {
    RunReport a, b;
};

/// Throws MismatchError unless both scenarios use the same case and disturbance.
Comparison compare_scenarios(const CaseData& a, const ScenarioConfig& sa, const CaseData& b,
                             const ScenarioConfig& sb);
void write_comparison_text(std::ostream& os, const Comparison& c);

/// 17 significant digits.
std::string format_double(double v);

} // namespace swingsafe

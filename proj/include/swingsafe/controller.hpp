#pragma once

#include "swingsafe/config.hpp"
#include "swingsafe/dynamics.hpp"
#include "swingsafe/linear_model.hpp"
#include "swingsafe/mpc_qp.hpp"
#include "swingsafe/solvers.hpp"

#include <optional>
#include <vector>

namespace swingsafe {

/// sat(u; eps |alpha_BL|, -eps |alpha_BL|).
double stability_filter(double alpha_bl, double u_mpc, double epsilon);

/// Low-pass filter rate; zero for buses outside I_u.
double lowpass_rhs(bool controlled, double alpha_bl, double omega, double u_hat, double tau);

/// Barrier law for one bus in I_omega given its frequency and
/// v = E omega + [D' Y_b sin lambda] - p - alpha_BL. Frequencies in rad/s.
double top_layer_law(const ControllerConfig& cfg, int bus, double omega, double v);

/// Same law evaluated from the full state; zero outside I_omega.
double top_layer(const PowerNetwork& net, const ControllerConfig& cfg, const SystemState& x,
                 const Eigen::VectorXd& p, int bus);

/// alpha = alpha_TL + alpha_BL. Throws PreconditionError if either term is
/// nonzero outside I_u.
Eigen::VectorXd compose_alpha(const PowerNetwork& net, const Eigen::VectorXd& alpha_tl,
                              const Eigen::VectorXd& alpha_bl);

struct MpcSampleRecord {
    double t = 0.0;
    Eigen::VectorXd u_mpc;
    long rounds = 0;
    bool converged = true;
    bool failed = false;
    double kkt = 0.0;
};

struct MpcSettings {
    SolverBackend backend = SolverBackend::Reference;
    SaddleOptions saddle;
    ReferenceOptions reference;
    bool warm_start = true;
};

/// Sampled MPC component: assembles and solves the prediction program at
/// every sampling instant and holds the result in between.
class MpcComponent {
public:
    MpcComponent(const PowerNetwork& net, const ControllerConfig& cfg, MpcSettings settings);

    /// Solves the program for the sampled state and the given forecast. On
    /// solver failure the previous output is kept and the failure logged.
    const Eigen::VectorXd& sample(double t, const SystemState& x,
                                  const std::vector<Eigen::VectorXd>& forecast);

    const Eigen::VectorXd& output() const { return u_; }
    const DiscreteModel& model() const { return dm_; }
    const MpcLayout& layout() const { return layout_; }
    const std::vector<MpcSampleRecord>& history() const { return history_; }
    QpInstance program(const SystemState& x, const std::vector<Eigen::VectorXd>& forecast) const;

private:
    SaddleState warm_start(const QpInstance& qp) const;

    const PowerNetwork& net_;
    ControllerConfig cfg_;
    MpcSettings settings_;
    DiscreteModel dm_;
    MpcLayout layout_;
    Eigen::VectorXd u_;
    std::optional<SaddleState> last_;
    std::optional<double> step_cache_;
    std::vector<MpcSampleRecord> history_;
};

/// Closed-loop law handed to the integrator. The MPC output is refreshed by
/// the simulation loop through `on_sample`.
class BilayerController : public ControlLaw {
public:
    BilayerController(const PowerNetwork& net, const ScenarioConfig& sc);

    double top_layer(int bus, double omega, double v) const override;
    double filtered_mpc(int bus, double alpha_bl) const override;
    bool bottom_layer_enabled() const override;
    double filter_tau(int bus) const override;

    /// Samples the MPC when t is a sampling instant and enables the
    /// controller once t reaches controller_start.
    void on_step(double t, const SystemState& x, const DisturbanceProfile& dist,
                 bool sampling_instant) override;

    /// u_MPC as applied before the stability filter (including any shift).
    double applied_mpc(int bus) const;
    bool active() const { return active_; }
    const MpcComponent* mpc() const { return mpc_ ? &*mpc_ : nullptr; }

private:
    const PowerNetwork& net_;
    ControllerConfig cfg_;
    ControlMode mode_;
    double shift_;
    double start_;
    bool active_ = false;
    std::optional<MpcComponent> mpc_;
};

} // namespace swingsafe

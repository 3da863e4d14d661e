#pragma once

#include "swingsafe/config.hpp"
#include "swingsafe/qp.hpp"

#include <vector>

namespace swingsafe {

struct KktResidual {
    double stationarity = 0.0;   // |H y + f + R1' eta + R2' mu|
    double primal_ineq = 0.0;    // |max(R1 y - r1, 0)|
    double primal_eq = 0.0;      // |R2 y - r2|
    double complementarity = 0.0; // |eta' (R1 y - r1)|

    double max() const;
};

KktResidual kkt_residual(const QpInstance& qp, const Eigen::VectorXd& y, const Eigen::VectorXd& eta,
                         const Eigen::VectorXd& mu);

struct QpSolution {
    Eigen::VectorXd y, eta, mu;
    int iterations = 0;
    KktResidual kkt;
};

struct ReferenceOptions {
    double tol = 1e-9;
    int max_iterations = 200;
};

/// Primal-dual interior point method with Mehrotra correction on the full
/// sparse KKT system. H only needs to be positive semidefinite as long as
/// the KKT matrix is nonsingular. Throws NoConvergence.
QpSolution solve_qp_reference(const QpInstance& qp, const ReferenceOptions& opts = {});

struct SaddleState {
    Eigen::VectorXd z, eta, mu;

    static SaddleState zeros(const QpInstance& qp);
};

struct SaddleDerivative {
    Eigen::VectorXd dz, deta, dmu;
};

/// Right-hand side of the projected saddle-point flow.
SaddleDerivative saddle_rhs(const QpInstance& qp, const SaddleState& s, const SaddleGains& gains);

/// Largest explicit Euler step for which the linearized flow (all
/// inequality rows active) stays contractive, times a 0.9 safety factor.
/// Returns the step minimizing the worst mode's amplification if that is
/// smaller.
double saddle_step_limit(const QpInstance& qp, const SaddleGains& gains);

struct TraceRow {
    long round = 0;
    double dz_norm = 0.0;
    KktResidual kkt;
    double oracle_distance = -1.0; // relative, or -1 without an oracle
};

struct SaddleResult {
    SaddleState state;
    long rounds = 0;
    double step = 0.0;
    bool converged = false;
    KktResidual kkt;
    std::vector<TraceRow> trace;
};

/// Precomputed transposes shared by the centralized and distributed runs so
/// both accumulate every sum in the same order.
struct SaddleOperator {
    explicit SaddleOperator(const QpInstance& qp);
    const QpInstance* qp;
    SparseMatrix R1t, R2t;

    /// (H z + f) + R1' eta + R2' mu at entry j.
    double gradient_entry(int j, const double* z, const double* eta, const double* mu) const;
    double ineq_entry(int r, const double* z) const; // (R1 z - r1)_r
    double eq_entry(int r, const double* z) const;   // (R2 z - r2)_r
};

/// Explicit Euler on the projected flow. Stops when the KKT residual drops
/// to opts.kkt_tol. Throws NoConvergence (when opts.require_convergence)
/// and Divergence. When `oracle` is given the trace records the relative
/// distance to it.
SaddleResult saddle_integrate(const QpInstance& qp, const SaddleState& start,
                              const SaddleOptions& opts, const Eigen::VectorXd* oracle = nullptr);

/// Step actually used for the given options.
double effective_step(const QpInstance& qp, const SaddleOptions& opts);

// Multi-agent execution.

struct AgentPlan {
    int id = 0;
    std::vector<int> primal; // owned variables
    std::vector<int> ineq;   // owned rows of R1
    std::vector<int> eq;     // owned rows of R2
};

/// One agent per node and edge, owning what the QP's owner maps assign.
std::vector<AgentPlan> make_agents(const QpInstance& qp);

enum class ReadKind { Primal, Dual };

/// Aggregated reads between one pair of agents.
struct MessageRecord {
    int reader = 0;
    int writer = 0;
    ReadKind kind = ReadKind::Primal;
    int distance = 0;
    long values_per_round = 0;
    long first_round = 0;
    long last_round = 0;
};

struct MessageLog {
    std::vector<MessageRecord> records;
    long rounds = 0;
    int max_primal_distance = 0;
    int max_dual_distance = 0;
};

struct DistributedResult {
    SaddleResult result;
    MessageLog log;
};

/// Synchronous rounds: every agent reads the values it needs from the
/// agents that own them, then all agents update their own entries.
/// Throws OwnershipGap, LocalityViolation, NoConvergence and Divergence.
DistributedResult distributed_execute(const QpInstance& qp, const std::vector<AgentPlan>& agents,
                                      const SaddleState& start, const SaddleOptions& opts,
                                      const Eigen::VectorXd* oracle = nullptr);

} // namespace swingsafe

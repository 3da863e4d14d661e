#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace swingsafe {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Transmission line. `pos` is the positive end under the fixed orientation.
struct Line {
    int pos = 0;
    int neg = 0;
    double susceptance = 0.0;
};

/// Swing-equation network. Buses are indexed 0..n-1 internally; `labels`
/// holds the identifiers used in case files and reports.
struct PowerNetwork {
    std::vector<int> labels;
    std::vector<Line> lines;
    Eigen::VectorXd inertia;   // M_i >= 0
    Eigen::VectorXd damping;   // E_i > 0
    Eigen::VectorXd injection; // p_i, balanced
    std::vector<int> controlled; // I_u, sorted
    std::vector<int> safety;     // I_omega, sorted, subset of I_u

    int n_buses() const { return static_cast<int>(inertia.size()); }
    int n_lines() const { return static_cast<int>(lines.size()); }
    bool is_controlled(int bus) const;
    bool is_safety(int bus) const;
    bool has_inertia(int bus) const { return inertia[bus] > 0.0; }
    std::vector<int> incident_lines(int bus) const;
    Eigen::VectorXd susceptances() const;
};

/// Throws InvalidNetwork / DisconnectedGraph / UnbalancedInjection.
void validate(const PowerNetwork& net, double balance_tol = 1e-9);
bool is_connected(int n_buses, const std::vector<Line>& lines);

Eigen::MatrixXd incidence_matrix(const PowerNetwork& net);
SparseMatrix incidence_sparse(const PowerNetwork& net);
Eigen::MatrixXd weighted_laplacian(const PowerNetwork& net);

/// Moore-Penrose pseudoinverse of a symmetric matrix via eigendecomposition;
/// eigenvalues below rel_cutoff * max|eig| are treated as zero.
Eigen::MatrixXd symmetric_pinv(const Eigen::MatrixXd& a, double rel_cutoff = 1e-10);

struct EquilibriumCheck {
    bool holds = false;
    double value = 0.0; // max over lines of |z_i - z_j| with z = L^+ p
};

EquilibriumCheck check_equilibrium_condition(const PowerNetwork& net);
EquilibriumCheck check_equilibrium_condition(const PowerNetwork& net, const Eigen::VectorXd& p);

struct EquilibriumOptions {
    int max_iterations = 100;
    double tolerance = 1e-12;
};

/// Steady-state line angles lambda with D^T Y_b sin(lambda) = p and lambda in
/// range(D), |lambda_j| <= pi/2. Throws NoConvergence.
Eigen::VectorXd compute_equilibrium(const PowerNetwork& net, const EquilibriumOptions& opts = {});
Eigen::VectorXd compute_equilibrium(const PowerNetwork& net, const Eigen::VectorXd& p,
                                    const EquilibriumOptions& opts = {});

/// || (I - D D^+) lambda ||, distance of lambda from range(D).
double range_residual(const Eigen::MatrixXd& incidence, const Eigen::VectorXd& lambda);

/// D^T Y_b sin(lambda): net power flowing out of each bus.
Eigen::VectorXd bus_outflow(const PowerNetwork& net, const Eigen::VectorXd& lambda);

} // namespace swingsafe

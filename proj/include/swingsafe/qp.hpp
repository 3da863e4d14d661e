#pragma once

#include "swingsafe/network.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace swingsafe {

/// min 1/2 Y'HY + f'Y + constant  s.t.  R1 Y <= r1,  R2 Y = r2.
///
/// Agents are the nodes 0..n_nodes-1 followed by one agent per edge
/// (agent n_nodes + j for edge j). Every variable and every constraint row
/// belongs to exactly one agent.
struct QpInstance {
    SparseMatrix H;
    Eigen::VectorXd f;
    double constant = 0.0;
    SparseMatrix R1;
    Eigen::VectorXd r1;
    SparseMatrix R2;
    Eigen::VectorXd r2;

    int n_nodes = 1;
    std::vector<std::pair<int, int>> edge_ends;
    std::vector<int> owner;      // per variable
    std::vector<int> ineq_owner; // per row of R1
    std::vector<int> eq_owner;   // per row of R2
    std::vector<int> sign_pattern; // per bus, +1 or -1; informational

    int dim() const { return static_cast<int>(f.size()); }
    int n_ineq() const { return static_cast<int>(r1.size()); }
    int n_eq() const { return static_cast<int>(r2.size()); }
    int n_agents() const { return n_nodes + static_cast<int>(edge_ends.size()); }

    /// Gives every variable and row to agent 0 on a single-node graph.
    void assign_single_agent();
};

/// Throws DimensionMismatch on inconsistent sizes or owner ids.
void check_dimensions(const QpInstance& qp);

double objective(const QpInstance& qp, const Eigen::VectorXd& y);

/// Hop distances in the node-edge incidence graph of the agents.
class AgentGraph {
public:
    explicit AgentGraph(const QpInstance& qp);
    int size() const { return n_; }
    int distance(int a, int b) const { return dist_[static_cast<std::size_t>(a) * n_ + b]; }

private:
    int n_;
    std::vector<int> dist_;
};

/// Plain-text sparse triplet format, "# swingsafe-qp v1". Floats use 17
/// significant digits so a round trip is exact.
void write_qp(std::ostream& os, const QpInstance& qp);
void save_qp(const std::string& path, const QpInstance& qp);
/// Throws SchemaError on malformed input.
QpInstance read_qp(std::istream& is);
QpInstance load_qp(const std::string& path);

} // namespace swingsafe

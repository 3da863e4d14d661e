#include "swingsafe/qp.hpp"

#include "swingsafe/errors.hpp"

#include <deque>
#include <limits>

namespace swingsafe {

void QpInstance::assign_single_agent() {
    n_nodes = 1;
    edge_ends.clear();
    owner.assign(dim(), 0);
    ineq_owner.assign(n_ineq(), 0);
    eq_owner.assign(n_eq(), 0);
}

void check_dimensions(const QpInstance& qp) {
    const int n = qp.dim();
    auto fail = [](const std::string& w) { throw DimensionMismatch(w); };
    if (qp.H.rows() != n || qp.H.cols() != n) fail("H must be dim x dim");
    if (qp.R1.rows() != qp.n_ineq() || (qp.R1.rows() > 0 && qp.R1.cols() != n))
        fail("R1 does not match r1 or the variable count");
    if (qp.R2.rows() != qp.n_eq() || (qp.R2.rows() > 0 && qp.R2.cols() != n))
        fail("R2 does not match r2 or the variable count");
    if (static_cast<int>(qp.owner.size()) != n) fail("owner map must cover every variable");
    if (static_cast<int>(qp.ineq_owner.size()) != qp.n_ineq()) fail("inequality owner map size");
    if (static_cast<int>(qp.eq_owner.size()) != qp.n_eq()) fail("equality owner map size");
    if (qp.n_nodes < 1) fail("at least one node agent is required");
    const int agents = qp.n_agents();
    auto in_range = [&](int a) { return a >= 0 && a < agents; };
    for (int a : qp.owner)
        if (!in_range(a)) fail("variable owner out of range");
    for (int a : qp.ineq_owner)
        if (!in_range(a)) fail("inequality owner out of range");
    for (int a : qp.eq_owner)
        if (!in_range(a)) fail("equality owner out of range");
    for (auto [p, q] : qp.edge_ends)
        if (p < 0 || p >= qp.n_nodes || q < 0 || q >= qp.n_nodes) fail("edge end out of range");
}

double objective(const QpInstance& qp, const Eigen::VectorXd& y) {
    return 0.5 * y.dot(qp.H * y) + qp.f.dot(y) + qp.constant;
}

AgentGraph::AgentGraph(const QpInstance& qp) : n_(qp.n_agents()) {
    std::vector<std::vector<int>> adj(n_);
    for (std::size_t j = 0; j < qp.edge_ends.size(); ++j) {
        const int e = qp.n_nodes + static_cast<int>(j);
        for (int v : {qp.edge_ends[j].first, qp.edge_ends[j].second}) {
            adj[e].push_back(v);
            adj[v].push_back(e);
        }
    }
    const int inf = std::numeric_limits<int>::max() / 2;
    dist_.assign(static_cast<std::size_t>(n_) * n_, inf);
    for (int s = 0; s < n_; ++s) {
        int* row = &dist_[static_cast<std::size_t>(s) * n_];
        std::deque<int> q{s};
        row[s] = 0;
        while (!q.empty()) {
            const int a = q.front();
            q.pop_front();
            for (int b : adj[a])
                if (row[b] == inf) {
                    row[b] = row[a] + 1;
                    q.push_back(b);
                }
        }
    }
}

} // namespace swingsafe

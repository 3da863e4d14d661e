#include "swingsafe/network.hpp"

#include "swingsafe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

namespace swingsafe {

bool PowerNetwork::is_controlled(int bus) const {
    return std::binary_search(controlled.begin(), controlled.end(), bus);
}

bool PowerNetwork::is_safety(int bus) const {
    return std::binary_search(safety.begin(), safety.end(), bus);
}

std::vector<int> PowerNetwork::incident_lines(int bus) const {
    std::vector<int> out;
    for (int k = 0; k < n_lines(); ++k)
        if (lines[k].pos == bus || lines[k].neg == bus) out.push_back(k);
    return out;
}

Eigen::VectorXd PowerNetwork::susceptances() const {
    Eigen::VectorXd b(n_lines());
    for (int k = 0; k < n_lines(); ++k) b[k] = lines[k].susceptance;
    return b;
}

bool is_connected(int n_buses, const std::vector<Line>& lines) {
    if (n_buses == 0) return false;
    std::vector<std::vector<int>> adj(n_buses);
    for (const auto& l : lines) {
        adj[l.pos].push_back(l.neg);
        adj[l.neg].push_back(l.pos);
    }
    std::vector<bool> seen(n_buses, false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    int count = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                ++count;
                q.push(v);
            }
        }
    }
    return count == n_buses;
}

void validate(const PowerNetwork& net, double balance_tol) {
    const int n = net.n_buses();
    auto fail = [](const std::string& msg) { throw InvalidNetwork(msg); };
    if (n < 2) fail("network needs at least two buses");
    if (net.damping.size() != n || net.injection.size() != n)
        fail("per-bus parameter vectors have inconsistent sizes");
    if (!net.labels.empty() && static_cast<int>(net.labels.size()) != n)
        fail("label count does not match bus count");
    for (int i = 0; i < n; ++i) {
        if (!(net.inertia[i] >= 0.0)) fail("inertia must be nonnegative");
        if (!(net.damping[i] > 0.0)) fail("damping must be positive");
        if (!std::isfinite(net.injection[i])) fail("injection must be finite");
    }
    if ((net.inertia.array() > 0.0).count() == 0) fail("at least one bus needs positive inertia");
    for (const auto& l : net.lines) {
        if (l.pos < 0 || l.pos >= n || l.neg < 0 || l.neg >= n || l.pos == l.neg)
            fail("line endpoints out of range or self loop");
        if (!(l.susceptance > 0.0)) fail("susceptance must be positive");
    }
    auto check_set = [&](const std::vector<int>& s, const char* name) {
        if (!std::is_sorted(s.begin(), s.end()) ||
            std::adjacent_find(s.begin(), s.end()) != s.end())
            fail(std::string(name) + " set must be sorted and unique");
        for (int i : s)
            if (i < 0 || i >= n) fail(std::string(name) + " set index out of range");
    };
    check_set(net.controlled, "controlled");
    check_set(net.safety, "safety");
    if (!std::includes(net.controlled.begin(), net.controlled.end(), net.safety.begin(),
                       net.safety.end()))
        fail("safety set must be a subset of the controlled set");
    if (!is_connected(n, net.lines)) throw DisconnectedGraph("network graph is not connected");
    const double imbalance = net.injection.sum();
    if (std::abs(imbalance) > balance_tol * std::max(1.0, net.injection.cwiseAbs().sum())) {
        std::ostringstream os;
        os << "power injections sum to " << imbalance << " instead of 0";
        throw UnbalancedInjection(os.str());
    }
}

Eigen::MatrixXd incidence_matrix(const PowerNetwork& net) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(net.n_lines(), net.n_buses());
    for (int k = 0; k < net.n_lines(); ++k) {
        d(k, net.lines[k].pos) = 1.0;
        d(k, net.lines[k].neg) = -1.0;
    }
    return d;
}

SparseMatrix incidence_sparse(const PowerNetwork& net) {
    std::vector<Triplet> t;
    t.reserve(2 * net.lines.size());
    for (int k = 0; k < net.n_lines(); ++k) {
        t.emplace_back(k, net.lines[k].pos, 1.0);
        t.emplace_back(k, net.lines[k].neg, -1.0);
    }
    SparseMatrix d(net.n_lines(), net.n_buses());
    d.setFromTriplets(t.begin(), t.end());
    return d;
}

Eigen::MatrixXd weighted_laplacian(const PowerNetwork& net) {
    const Eigen::MatrixXd d = incidence_matrix(net);
    return d.transpose() * net.susceptances().asDiagonal() * d;
}

Eigen::MatrixXd symmetric_pinv(const Eigen::MatrixXd& a, double rel_cutoff) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cutoff = rel_cutoff * ev.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev[i]) > cutoff) inv[i] = 1.0 / ev[i];
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

EquilibriumCheck check_equilibrium_condition(const PowerNetwork& net, const Eigen::VectorXd& p) {
    const Eigen::VectorXd z = symmetric_pinv(weighted_laplacian(net)) * p;
    double worst = 0.0;
    for (const auto& l : net.lines) worst = std::max(worst, std::abs(z[l.pos] - z[l.neg]));
    return {worst < 1.0, worst};
}

EquilibriumCheck check_equilibrium_condition(const PowerNetwork& net) {
    return check_equilibrium_condition(net, net.injection);
}

Eigen::VectorXd bus_outflow(const PowerNetwork& net, const Eigen::VectorXd& lambda) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(net.n_buses());
    for (int k = 0; k < net.n_lines(); ++k) {
        const double flow = net.lines[k].susceptance * std::sin(lambda[k]);
        out[net.lines[k].pos] += flow;
        out[net.lines[k].neg] -= flow;
    }
    return out;
}

Eigen::VectorXd compute_equilibrium(const PowerNetwork& net, const Eigen::VectorXd& p,
                                    const EquilibriumOptions& opts) {
    const int n = net.n_buses();
    const int m = net.n_lines();
    const Eigen::MatrixXd d = incidence_matrix(net);
    const Eigen::VectorXd b = net.susceptances();
    // Reduced coordinates: theta of the last bus is pinned to zero.
    const Eigen::MatrixXd dr = d.leftCols(n - 1);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n - 1);

    auto residual = [&](const Eigen::VectorXd& th) -> Eigen::VectorXd {
        const Eigen::VectorXd lam = dr * th;
        return (bus_outflow(net, lam) - p).head(n - 1);
    };

    Eigen::VectorXd r = residual(theta);
    for (int it = 0; it < opts.max_iterations && r.cwiseAbs().maxCoeff() > opts.tolerance; ++it) {
        const Eigen::VectorXd lam = dr * theta;
        Eigen::VectorXd w(m);
        for (int k = 0; k < m; ++k) w[k] = b[k] * std::cos(lam[k]);
        const Eigen::MatrixXd jac = dr.transpose() * w.asDiagonal() * dr;
        const Eigen::VectorXd step = jac.fullPivLu().solve(-r);
        if (!step.allFinite()) break;
        double t = 1.0;
        const double r0 = r.norm();
        Eigen::VectorXd next = theta + step;
        Eigen::VectorXd rn = residual(next);
        while (rn.norm() > (1.0 - 1e-4 * t) * r0 && t > 1e-8) {
            t *= 0.5;
            next = theta + t * step;
            rn = residual(next);
        }
        theta = next;
        r = rn;
    }
    if (!(r.cwiseAbs().maxCoeff() <= std::max(opts.tolerance, 1e-10)))
        throw NoConvergence("equilibrium solve did not converge; the stability condition may be "
                            "close to violation");
    Eigen::VectorXd lambda = dr * theta;
    if (lambda.cwiseAbs().maxCoeff() > std::numbers::pi / 2)
        throw NoConvergence("equilibrium solve converged outside |lambda| <= pi/2");
    return lambda;
}

Eigen::VectorXd compute_equilibrium(const PowerNetwork& net, const EquilibriumOptions& opts) {
    return compute_equilibrium(net, net.injection, opts);
}

double range_residual(const Eigen::MatrixXd& incidence, const Eigen::VectorXd& lambda) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(incidence);
    const Eigen::MatrixXd projector = incidence * cod.pseudoInverse();
    return (lambda - projector * lambda).norm();
}

} // namespace swingsafe

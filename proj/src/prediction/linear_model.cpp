#include "swingsafe/linear_model.hpp"

#include "swingsafe/errors.hpp"

#include <Eigen/Eigenvalues>

namespace swingsafe {
namespace {

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& t) {
    SparseMatrix s(rows, cols);
    s.setFromTriplets(t.begin(), t.end());
    s.prune(0.0);
    s.makeCompressed();
    return s;
}

bool full_rank(const SparseMatrix& s) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(s)};
    return lu.rank() == s.rows();
}

} // namespace

LinearModel linearize(const PowerNetwork& net, const Eigen::VectorXd& tau) {
    const int n = net.n_buses();
    const int m = net.n_lines();
    if (tau.size() != n) throw DimensionMismatch("tau must have one entry per bus");
    LinearModel lm;
    lm.m = m;
    lm.n = n;
    const int dim = lm.state_dim();
    std::vector<Triplet> g, a, b1, b2;

    for (int k = 0; k < m; ++k) {
        const Line& l = net.lines[k];
        g.emplace_back(k, k, 1.0);
        a.emplace_back(k, lm.omega_index(l.pos), 1.0);
        a.emplace_back(k, lm.omega_index(l.neg), -1.0);
    }
    for (int i = 0; i < n; ++i) {
        const int r = lm.omega_index(i);
        g.emplace_back(r, r, net.inertia[i]);
        a.emplace_back(r, r, -net.damping[i]);
        for (int k : net.incident_lines(i)) {
            const double d = net.lines[k].pos == i ? 1.0 : -1.0;
            a.emplace_back(r, k, -d * net.lines[k].susceptance);
        }
        b1.emplace_back(r, i, 1.0);
        if (net.is_controlled(i)) a.emplace_back(r, lm.alpha_index(i), 1.0);
    }
    for (int i = 0; i < n; ++i) {
        const int r = lm.alpha_index(i);
        if (net.is_controlled(i)) {
            if (!(tau[i] > 0.0)) throw PreconditionError("filter time constant must be positive");
            g.emplace_back(r, r, net.inertia[i]);
            a.emplace_back(r, r, -1.0 / tau[i]);
            a.emplace_back(r, lm.omega_index(i), -1.0);
        } else {
            a.emplace_back(r, r, -1.0);
        }
        b2.emplace_back(r, i, 1.0);
    }
    lm.G = from_triplets(dim, dim, g);
    lm.A = from_triplets(dim, dim, a);
    lm.B1 = from_triplets(dim, n, b1);
    lm.B2 = from_triplets(dim, n, b2);
    return lm;
}

DiscreteModel discretize_backward_euler(const LinearModel& lm, double step, int horizon) {
    if (!(step > 0.0)) throw PreconditionError("prediction step must be positive");
    DiscreteModel dm{lm.m, lm.n, {}, {}, {}, {}, step, horizon};
    dm.F = lm.G - step * lm.A;
    dm.F.prune(0.0);
    if (!full_rank(dm.F))
        throw SingularF("F = G - T A is singular; try a smaller prediction step");
    dm.A = lm.G;
    dm.B1 = step * lm.B1;
    dm.B2 = step * lm.B2;
    return dm;
}

DiscreteModel discretize_forward_euler(const LinearModel& lm, double step, int horizon) {
    if (!(step > 0.0)) throw PreconditionError("prediction step must be positive");
    if (!full_rank(lm.G))
        throw SingularG("forward Euler needs an invertible G (zero-inertia or uncontrolled bus present)");
    DiscreteModel dm{lm.m, lm.n, lm.G, lm.G + step * lm.A, step * lm.B1, step * lm.B2, step, horizon};
    dm.A.prune(0.0);
    return dm;
}

SpectralCheck spectral_stability_check(const DiscreteModel& dm) {
    const Eigen::MatrixXd f(dm.F);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(f);
    if (lu.rank() != f.rows()) throw SingularF("F is singular");
    const Eigen::MatrixXd m = lu.solve(Eigen::MatrixXd(dm.A));
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
    return {radius, radius <= 1.0 + 1e-9};
}

} // namespace swingsafe

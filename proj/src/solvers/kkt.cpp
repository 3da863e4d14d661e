#include "swingsafe/errors.hpp"
#include "swingsafe/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace swingsafe {

double KktResidual::max() const {
    return std::max({stationarity, primal_ineq, primal_eq, complementarity});
}

KktResidual kkt_residual(const QpInstance& qp, const Eigen::VectorXd& y, const Eigen::VectorXd& eta,
                         const Eigen::VectorXd& mu) {
    if (y.size() != qp.dim() || eta.size() != qp.n_ineq() || mu.size() != qp.n_eq())
        throw DimensionMismatch("KKT residual: vector sizes do not match the program");
    KktResidual k;
    Eigen::VectorXd g = qp.H * y + qp.f;
    if (qp.n_ineq() > 0) g += qp.R1.transpose() * eta;
    if (qp.n_eq() > 0) g += qp.R2.transpose() * mu;
    k.stationarity = g.norm();
    if (qp.n_ineq() > 0) {
        const Eigen::VectorXd r = qp.R1 * y - qp.r1;
        k.primal_ineq = r.cwiseMax(0.0).norm();
        k.complementarity = std::abs(eta.dot(r));
    }
    if (qp.n_eq() > 0) k.primal_eq = (qp.R2 * y - qp.r2).norm();
    return k;
}

} // namespace swingsafe

#pragma once

#include "swingsafe/errors.hpp"
#include "swingsafe/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace swingsafe {

namespace detail {

// Shared driver: `round` advances the state by one explicit Euler step.
template <class Round>
SaddleResult run_saddle(const QpInstance& qp, const SaddleState& start, const SaddleOptions& opts,
                        const Eigen::VectorXd* oracle, double h, Round&& round) {
    SaddleResult res;
    res.state = start;
    res.step = h;
    const double scale = 1.0 + start.z.norm() + qp.f.norm() + qp.r1.norm() + qp.r2.norm();
    const double oracle_norm = oracle ? std::max(1.0, oracle->norm()) : 1.0;
    SaddleState best = start;
    KktResidual best_kkt = kkt_residual(qp, start.z, start.eta, start.mu);
    const long check_every = std::max<long>(1, opts.check_every);
    Eigen::VectorXd g(qp.dim());

    for (long k = 1; k <= opts.max_rounds; ++k) {
        round(res.state, g);
        res.rounds = k;
        const bool trace = opts.trace_every > 0 && k % opts.trace_every == 0;
        if (k % check_every != 0 && !trace && k != opts.max_rounds) continue;

        const double zn = res.state.z.norm();
        if (!std::isfinite(zn) || zn > opts.divergence_factor * scale)
            throw Divergence("saddle-point iteration diverged after " + std::to_string(k) +
                             " rounds (|Z| = " + std::to_string(zn) + ")");
        const KktResidual kkt = kkt_residual(qp, res.state.z, res.state.eta, res.state.mu);
        if (trace) {
            TraceRow row{k, g.norm() / opts.gains.primal, kkt, -1.0};
            if (oracle) row.oracle_distance = (res.state.z - *oracle).norm() / oracle_norm;
            res.trace.push_back(row);
        }
        if (kkt.max() < best_kkt.max()) {
            best_kkt = kkt;
            best = res.state;
        }
        if (k % check_every == 0 && kkt.max() <= opts.kkt_tol) {
            res.converged = true;
            res.kkt = kkt;
            return res;
        }
    }
    res.kkt = best_kkt;
    res.state = best;
    if (opts.require_convergence)
        throw NoConvergence("saddle-point iteration: KKT residual " + std::to_string(best_kkt.max()) +
                            " after " + std::to_string(opts.max_rounds) + " rounds");
    return res;
}

} // namespace detail

} // namespace swingsafe

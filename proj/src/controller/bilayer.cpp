#include "swingsafe/controller.hpp"
#include "swingsafe/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace swingsafe {

MpcComponent::MpcComponent(const PowerNetwork& net, const ControllerConfig& cfg, MpcSettings settings)
    : net_(net), cfg_(cfg), settings_(std::move(settings)),
      dm_(discretize_backward_euler(linearize(net, cfg.tau), cfg.step, cfg.horizon_steps())),
      layout_(net, cfg.horizon_steps()), u_(Eigen::VectorXd::Zero(net.n_buses())) {}

QpInstance MpcComponent::program(const SystemState& x,
                                 const std::vector<Eigen::VectorXd>& forecast) const {
    return assemble_mpc_qp(dm_, net_, cfg_, x, forecast);
}

SaddleState MpcComponent::warm_start(const QpInstance& qp) const {
    if (!settings_.warm_start || !last_ || last_->z.size() != qp.dim()) return SaddleState::zeros(qp);
    // Shift the previous prediction forward by one sampling period.
    const int shift = std::max(1, static_cast<int>(std::lround(cfg_.sampling_period / cfg_.step)));
    const MpcLayout& L = layout_;
    const int N = L.horizon, blk = L.block();
    SaddleState s = *last_;
    for (int k = 1; k <= N; ++k) {
        const int from = std::min(N, k + shift);
        s.z.segment(L.state(k, 0), blk) = last_->z.segment(L.state(from, 0), blk);
        if (L.n_safe > 0) s.z.segment(L.s(k, 0), L.n_safe) = last_->z.segment(L.s(from, 0), L.n_safe);
        const int band = 2 * L.n_safe;
        if (band > 0) s.eta.segment((k - 1) * band, band) = last_->eta.segment((from - 1) * band, band);
    }
    for (int k = 1; k < N; ++k) {
        const int from = std::min(N - 1, k + shift);
        s.mu.segment((k - 1) * blk, blk) = last_->mu.segment((from - 1) * blk, blk);
    }
    return s;
}

const Eigen::VectorXd& MpcComponent::sample(double t, const SystemState& x,
                                            const std::vector<Eigen::VectorXd>& forecast) {
    MpcSampleRecord rec;
    rec.t = t;
    try {
        const QpInstance qp = program(x, forecast);
        Eigen::VectorXd y;
        switch (settings_.backend) {
        case SolverBackend::Reference: {
            const QpSolution sol = solve_qp_reference(qp, settings_.reference);
            y = sol.y;
            rec.rounds = sol.iterations;
            rec.kkt = sol.kkt.max();
            break;
        }
        case SolverBackend::SaddleCentral:
        case SolverBackend::SaddleDistributed: {
            SaddleOptions opts = settings_.saddle;
            opts.require_convergence = false;
            // The program's matrices do not change between samples, so the
            // step bound is computed once.
            if (opts.limit_step) {
                if (!step_cache_) step_cache_ = effective_step(qp, opts);
                opts.step = *step_cache_;
                opts.limit_step = false;
            }
            const SaddleState start = warm_start(qp);
            SaddleResult res = settings_.backend == SolverBackend::SaddleCentral
                                   ? saddle_integrate(qp, start, opts)
                                   : distributed_execute(qp, make_agents(qp), start, opts).result;
            y = res.state.z;
            rec.rounds = res.rounds;
            rec.converged = res.converged;
            rec.kkt = res.kkt.max();
            if (!res.converged)
                spdlog::warn("MPC sample at t = {:.3f} s: round budget exhausted, KKT residual {:.3e}", t,
                             rec.kkt);
            last_ = std::move(res.state);
            break;
        }
        }
        u_ = mpc_control(layout_, y);
        for (int i = 0; i < net_.n_buses(); ++i)
            if (!net_.is_controlled(i)) u_[i] = 0.0;
    } catch (const Error& e) {
        rec.failed = true;
        spdlog::warn("MPC sample at t = {:.3f} s failed ({}); holding the previous output", t, e.what());
    }
    rec.u_mpc = u_;
    history_.push_back(rec);
    return u_;
}

BilayerController::BilayerController(const PowerNetwork& net, const ScenarioConfig& sc)
    : net_(net), cfg_(sc.controller), mode_(sc.mode), shift_(sc.shift), start_(sc.controller_start) {
    if (mode_ == ControlMode::Bilayered || mode_ == ControlMode::BilayeredShift) {
        MpcSettings s;
        s.backend = sc.backend;
        s.saddle = sc.saddle;
        mpc_.emplace(net, cfg_, s);
    }
}

double BilayerController::top_layer(int bus, double omega, double v) const {
    if (!active_ || mode_ == ControlMode::OpenLoop || !net_.is_safety(bus)) return 0.0;
    return top_layer_law(cfg_, bus, omega, v);
}

double BilayerController::applied_mpc(int bus) const {
    if (!mpc_ || !net_.is_controlled(bus)) return 0.0;
    const double shift = mode_ == ControlMode::BilayeredShift ? shift_ : 0.0;
    return mpc_->output()[bus] + shift;
}

double BilayerController::filtered_mpc(int bus, double alpha_bl) const {
    if (!bottom_layer_enabled() || !net_.is_controlled(bus)) return 0.0;
    return stability_filter(alpha_bl, applied_mpc(bus), cfg_.epsilon[bus]);
}

bool BilayerController::bottom_layer_enabled() const { return active_ && mpc_.has_value(); }

double BilayerController::filter_tau(int bus) const { return cfg_.tau[bus]; }

void BilayerController::on_step(double t, const SystemState& x, const DisturbanceProfile& dist,
                                bool sampling_instant) {
    if (!active_ && t >= start_ - 1e-12) active_ = true;
    if (!active_ || !mpc_ || !sampling_instant) return;
    mpc_->sample(t, x,
                 make_forecast(net_, dist, cfg_.forecast, t, cfg_.step, cfg_.horizon_steps()));
}

} // namespace swingsafe

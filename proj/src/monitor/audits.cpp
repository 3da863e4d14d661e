#include "swingsafe/monitor.hpp"

#include <algorithm>
#include <cmath>

namespace swingsafe {

LyapunovReport lyapunov_decrease_audit(const Trajectory& traj, double tol, double slack,
                                       double t_from) {
    LyapunovReport r;
    const int rows = traj.rows();
    for (int k = 0; k < rows; ++k) {
        if (traj.t[k] < t_from - 1e-12) continue;
        bool bad = false;
        if (k + 1 < rows) {
            const double dt = traj.t[k + 1] - traj.t[k];
            const double dv = traj.Vbar[k + 1] - traj.Vbar[k];
            const double scaled = dv / (dt * (1.0 + std::abs(traj.Vbar[k])));
            r.worst_increase = std::max(r.worst_increase, scaled);
            bad = scaled > tol;
            ++r.steps;
        }
        const double excess = traj.vbar_rate[k] - traj.dissipation_bound[k];
        r.worst_bound_excess = std::max(r.worst_bound_excess, excess);
        bad = bad || excess > slack;
        if (bad) {
            r.pass = false;
            if (r.offending_rows.size() < 20) r.offending_rows.push_back(k);
        }
    }
    return r;
}

void require_pass(const LyapunovReport& r) {
    if (r.pass) return;
    std::string rows;
    for (int k : r.offending_rows) rows += (rows.empty() ? "" : ", ") + std::to_string(k);
    throw AuditFailure("energy increased at logged rows " + rows + " (worst scaled increase " +
                       std::to_string(r.worst_increase) + ", worst bound excess " +
                       std::to_string(r.worst_bound_excess) + ")");
}

bool SafetyReport::pass(double tolerance_hz) const {
    for (const BusSafety& b : buses) {
        if (b.unsafe_at_start) {
            if (!b.monotone || b.entry_time < 0.0) return false;
        } else if (b.overshoot_hz > tolerance_hz) {
            return false;
        }
    }
    return true;
}

SafetyReport safety_audit(const Trajectory& traj, const ControllerConfig& cfg,
                          double monotone_tolerance_hz) {
    SafetyReport rep;
    const int rows = traj.rows();
    for (int i : traj.safety) {
        BusSafety b;
        b.bus = i;
        const double lo = cfg.omega_min[i], hi = cfg.omega_max[i];
        auto distance = [&](double w) { return std::max({0.0, w - hi, lo - w}); };
        b.min_hz = b.max_hz = rows > 0 ? rad_to_hz(traj.at(traj.omega, 0, i)) : 0.0;
        int start_row = -1;
        for (int k = 0; k < rows; ++k) {
            const double w = traj.at(traj.omega, k, i);
            b.min_hz = std::min(b.min_hz, rad_to_hz(w));
            b.max_hz = std::max(b.max_hz, rad_to_hz(w));
            if (start_row < 0 && traj.t[k] >= traj.controller_start - 1e-12) start_row = k;
        }
        if (start_row >= 0) {
            double prev = distance(traj.at(traj.omega, start_row, i));
            b.unsafe_at_start = prev > 0.0;
            if (!b.unsafe_at_start) b.entry_time = traj.t[start_row];
            for (int k = start_row; k < rows; ++k) {
                const double d = distance(traj.at(traj.omega, k, i));
                if (b.unsafe_at_start && b.entry_time < 0.0) {
                    if (d == 0.0) {
                        b.entry_time = traj.t[k];
                    } else if (k > start_row) {
                        const double growth = rad_to_hz(d - prev);
                        b.worst_growth_hz = std::max(b.worst_growth_hz, growth);
                        if (growth > monotone_tolerance_hz) b.monotone = false;
                    }
                } else {
                    b.overshoot_hz = std::max(b.overshoot_hz, rad_to_hz(d));
                }
                prev = d;
            }
        }
        rep.worst_overshoot_hz = std::max(rep.worst_overshoot_hz, b.overshoot_hz);
        rep.buses.push_back(b);
    }
    return rep;
}

InvariantReport invariant_audit(const Trajectory& traj, const ControllerConfig& cfg,
                                double filter_tolerance) {
    InvariantReport r;
    for (int k = 0; k < traj.rows(); ++k) {
        for (int i : traj.controlled) {
            const double a = traj.at(traj.alpha_bl, k, i);
            const double excess = a * traj.at(traj.u_hat, k, i) - cfg.epsilon[i] * a * a;
            r.worst_filter_excess = std::max(r.worst_filter_excess, excess);
        }
        for (int i : traj.safety)
            r.worst_sign = std::max(r.worst_sign, traj.at(traj.omega, k, i) * traj.at(traj.alpha_tl, k, i));
    }
    r.pass = r.worst_filter_excess <= filter_tolerance && r.worst_sign <= 0.0;
    return r;
}

bool ConvergenceReport::pass(double ratio) const {
    return omega_end <= ratio * omega_peak && alpha_bl_end <= ratio * alpha_bl_peak &&
           u_hat_end <= ratio * u_hat_peak;
}

ConvergenceReport convergence_report(const Trajectory& traj) {
    ConvergenceReport r;
    const int rows = traj.rows();
    if (rows == 0) return r;
    auto peak_end = [&](const std::vector<double>& v, const std::vector<int>& set, double& peak,
                        double& end) {
        for (int k = 0; k < rows; ++k)
            for (int i : set) peak = std::max(peak, std::abs(traj.at(v, k, i)));
        for (int i : set) end = std::max(end, std::abs(traj.at(v, rows - 1, i)));
    };
    std::vector<int> all(traj.n);
    for (int i = 0; i < traj.n; ++i) all[i] = i;
    peak_end(traj.omega, all, r.omega_peak, r.omega_end);
    peak_end(traj.alpha_bl, traj.controlled, r.alpha_bl_peak, r.alpha_bl_end);
    peak_end(traj.u_hat, traj.controlled, r.u_hat_peak, r.u_hat_end);
    peak_end(traj.u_mpc, traj.controlled, r.u_mpc_peak, r.u_mpc_end);
    return r;
}

double control_cost(const Trajectory& traj, const Eigen::VectorXd& c, double t0, double t1) {
    double total = 0.0;
    auto stage = [&](int k) {
        double s = 0.0;
        for (int i : traj.controlled) s += c[i] * traj.at(traj.alpha, k, i) * traj.at(traj.alpha, k, i);
        return s;
    };
    for (int k = 0; k + 1 < traj.rows(); ++k) {
        const double a = std::max(traj.t[k], t0), b = std::min(traj.t[k + 1], t1);
        if (b <= a) continue;
        // Linear interpolation of the integrand inside the clipped interval.
        const double span = traj.t[k + 1] - traj.t[k];
        const double f0 = stage(k), f1 = stage(k + 1);
        const double fa = f0 + (f1 - f0) * (a - traj.t[k]) / span;
        const double fb = f0 + (f1 - f0) * (b - traj.t[k]) / span;
        total += 0.5 * (fa + fb) * (b - a);
    }
    return total;
}

double control_cost(const Trajectory& traj, const Eigen::VectorXd& c) {
    if (traj.rows() == 0) return 0.0;
    return control_cost(traj, c, traj.t.front(), traj.t.back());
}

} // namespace swingsafe

#include "swingsafe/errors.hpp"
#include "swingsafe/locality.hpp"
#include "swingsafe/simulate.hpp"

#include <cmath>

namespace swingsafe {

std::vector<Audit> parse_audits(const std::vector<std::string>& names) {
    std::vector<Audit> out;
    auto add = [&](Audit a) {
        for (Audit b : out)
            if (a == b) return;
        out.push_back(a);
    };
    for (const std::string& s : names) {
        if (s == "safety") add(Audit::Safety);
        else if (s == "lyapunov") add(Audit::Lyapunov);
        else if (s == "locality") add(Audit::Locality);
        else if (s == "all") {
            add(Audit::Safety);
            add(Audit::Lyapunov);
            add(Audit::Locality);
        } else {
            throw ConfigError("unknown audit '" + s + "' (expected safety, lyapunov, locality or all)");
        }
    }
    return out;
}

bool RunReport::audits_pass() const {
    for (const AuditSummary* a : {&safety_audit, &lyapunov_audit, &locality_audit})
        if (a->requested && !a->pass) return false;
    return true;
}

QpInstance scenario_program(const PowerNetwork& net, const ScenarioConfig& sc) {
    const ControllerConfig& cfg = sc.controller;
    const DiscreteModel dm =
        discretize_backward_euler(linearize(net, cfg.tau), cfg.step, cfg.horizon_steps());
    const Eigen::VectorXd p0 = injection_at(net, sc.disturbance, 0.0);
    SystemState x = equilibrium_state(net, compute_equilibrium(net, p0));
    if (sc.omega0) x.omega = *sc.omega0;
    if (sc.alpha_bl0) x.alpha_bl = *sc.alpha_bl0;
    const ControlLaw none;
    x.omega = evaluate_stage(net, sc.disturbance, none, 0.0, x).omega;
    return assemble_mpc_qp(dm, net, cfg, x,
                           make_forecast(net, sc.disturbance, cfg.forecast, 0.0, cfg.step,
                                         cfg.horizon_steps()));
}

LocalityReport scenario_locality(const PowerNetwork& net, const ScenarioConfig& sc) {
    return locality_audit(scenario_program(net, sc));
}

RunReport run_scenario(const CaseData& data, const ScenarioConfig& sc, const std::vector<Audit>& audits,
                       SimulationResult* keep) {
    const PowerNetwork& net = data.network;
    RunReport r;
    r.case_name = data.name;
    r.mode = sc.mode;
    r.backend = sc.backend;
    SimulationResult sim = simulate(net, sc);
    const Trajectory& tr = sim.trajectory;
    r.wall_seconds = sim.wall_seconds;
    r.cost = control_cost(tr, sc.controller.cost_weight);
    r.safety = safety_audit(tr, sc.controller);
    r.invariants = invariant_audit(tr, sc.controller);
    r.convergence = convergence_report(tr);
    if (tr.rows() > 0) {
        r.min_hz = r.max_hz = rad_to_hz(tr.at(tr.omega, 0, 0));
        for (int k = 0; k < tr.rows(); ++k)
            for (int i = 0; i < tr.n; ++i) {
                const double w = rad_to_hz(tr.at(tr.omega, k, i));
                r.min_hz = std::min(r.min_hz, w);
                r.max_hz = std::max(r.max_hz, w);
                if (std::abs(w) > 1e-3) r.settling_time = tr.t[k];
            }
    }

    for (Audit a : audits) {
        switch (a) {
        case Audit::Safety: {
            r.safety_audit.requested = true;
            r.safety_audit.pass = r.safety.pass(1e-3) && r.invariants.pass;
            r.safety_audit.detail = "worst overshoot " + format_double(r.safety.worst_overshoot_hz) +
                                    " Hz; filter excess " + format_double(r.invariants.worst_filter_excess) +
                                    "; max omega*alpha_TL " + format_double(r.invariants.worst_sign);
            break;
        }
        case Audit::Lyapunov: {
            r.lyapunov_audit.requested = true;
            // Vbar certifies decrease only while p is constant, i.e. after
            // the disturbance has ended.
            const double from = sc.disturbance.end_time();
            r.lyapunov = lyapunov_decrease_audit(tr, 1e-8, 1e-6, from);
            r.lyapunov_audit.pass = r.lyapunov->pass;
            r.lyapunov_audit.detail = "checked from t = " + format_double(from) + " s over " +
                                      std::to_string(r.lyapunov->steps) + " steps; worst scaled increase " +
                                      format_double(r.lyapunov->worst_increase) +
                                      "; worst bound excess " + format_double(r.lyapunov->worst_bound_excess);
            break;
        }
        case Audit::Locality: {
            r.locality_audit.requested = true;
            try {
                const QpInstance qp = scenario_program(net, sc);
                r.locality = locality_audit(qp);
                // Dry run of the agents to certify the read pattern.
                SaddleOptions opts = sc.saddle;
                opts.max_rounds = 1;
                opts.require_convergence = false;
                opts.limit_step = false;
                const MessageLog log =
                    distributed_execute(qp, make_agents(qp), SaddleState::zeros(qp), opts).log;
                r.locality_audit.pass = log.max_primal_distance <= 2 && log.max_dual_distance <= 1;
                r.locality_audit.detail =
                    std::to_string(r.locality->rows_checked) + " rows, " +
                    std::to_string(r.locality->hessian_couplings) + " Hessian couplings; max row radius " +
                    std::to_string(r.locality->max_row_radius) + ", max Hessian distance " +
                    std::to_string(r.locality->max_hessian_distance) + ", max primal read " +
                    std::to_string(log.max_primal_distance) + ", max dual read " +
                    std::to_string(log.max_dual_distance);
            } catch (const LocalityViolation& e) {
                r.locality_audit.pass = false;
                r.locality_audit.detail = e.what();
            }
            break;
        }
        }
    }
    if (keep) *keep = std::move(sim);
    return r;
}

Comparison compare_scenarios(const CaseData& a, const ScenarioConfig& sa, const CaseData& b,
                             const ScenarioConfig& sb) {
    const PowerNetwork& na = a.network;
    const PowerNetwork& nb = b.network;
    bool same = na.n_buses() == nb.n_buses() && na.n_lines() == nb.n_lines() &&
                na.inertia == nb.inertia && na.damping == nb.damping && na.injection == nb.injection &&
                na.controlled == nb.controlled && na.safety == nb.safety;
    for (int k = 0; same && k < na.n_lines(); ++k)
        same = na.lines[k].pos == nb.lines[k].pos && na.lines[k].neg == nb.lines[k].neg &&
               na.lines[k].susceptance == nb.lines[k].susceptance;
    if (!same) throw MismatchError("compared scenarios use different networks");
    const DisturbanceProfile& da = sa.disturbance;
    const DisturbanceProfile& db = sb.disturbance;
    bool same_dist = da.buses == db.buses && da.segments.size() == db.segments.size();
    for (std::size_t k = 0; same_dist && k < da.segments.size(); ++k) {
        const auto &x = da.segments[k], &y = db.segments[k];
        same_dist = x.end == y.end && x.offset == y.offset && x.amplitude == y.amplitude &&
                    x.rate == y.rate && x.phase_time == y.phase_time;
    }
    if (!same_dist) throw MismatchError("compared scenarios use different disturbances");
    return {run_scenario(a, sa, {}), run_scenario(b, sb, {})};
}

} // namespace swingsafe

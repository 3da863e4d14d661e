#include "swingsafe/simulate.hpp"

#include <json.hpp>

#include <cstdio>
#include <ostream>

namespace swingsafe {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const PowerNetwork& net, const Trajectory& tr,
                          const ControllerConfig& cfg) {
    os << "t";
    for (int i : tr.safety) os << ",omega_hz_" << net.labels[i];
    for (int i : tr.controlled) os << ",alpha_" << net.labels[i];
    for (int i : tr.controlled) os << ",alpha_tl_" << net.labels[i];
    for (int i : tr.controlled) os << ",alpha_bl_" << net.labels[i];
    os << ",vbar";
    for (int i : tr.safety) os << ",unsafe_" << net.labels[i];
    os << '\n';
    for (int k = 0; k < tr.rows(); ++k) {
        os << format_double(tr.t[k]);
        for (int i : tr.safety) os << ',' << format_double(rad_to_hz(tr.at(tr.omega, k, i)));
        for (int i : tr.controlled) os << ',' << format_double(tr.at(tr.alpha, k, i));
        for (int i : tr.controlled) os << ',' << format_double(tr.at(tr.alpha_tl, k, i));
        for (int i : tr.controlled) os << ',' << format_double(tr.at(tr.alpha_bl, k, i));
        os << ',' << format_double(tr.Vbar[k]);
        for (int i : tr.safety) {
            const double w = tr.at(tr.omega, k, i);
            os << ',' << (w > cfg.omega_max[i] || w < cfg.omega_min[i] ? 1 : 0);
        }
        os << '\n';
    }
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
    os << "round,dz_norm,stationarity,primal_ineq,primal_eq,complementarity,oracle_distance\n";
    for (const TraceRow& r : trace) {
        os << r.round << ',' << format_double(r.dz_norm) << ',' << format_double(r.kkt.stationarity)
           << ',' << format_double(r.kkt.primal_ineq) << ',' << format_double(r.kkt.primal_eq) << ','
           << format_double(r.kkt.complementarity) << ',';
        if (r.oracle_distance >= 0.0) os << format_double(r.oracle_distance);
        os << '\n';
    }
}

namespace {

const char* verdict(const AuditSummary& a) {
    if (!a.requested) return "not requested";
    return a.pass ? "PASS" : "FAIL";
}

} // namespace

void write_report_text(std::ostream& os, const RunReport& r) {
    os << "case        " << r.case_name << '\n';
    os << "mode        " << to_string(r.mode) << '\n';
    os << "backend     " << to_string(r.backend) << '\n';
    os << "cost        " << format_double(r.cost) << '\n';
    os << "freq range  [" << format_double(r.min_hz) << ", " << format_double(r.max_hz) << "] Hz\n";
    os << "settling    " << format_double(r.settling_time) << " s\n";
    for (const BusSafety& b : r.safety.buses) {
        os << "bus " << b.bus << "       min " << format_double(b.min_hz) << " Hz, max "
           << format_double(b.max_hz) << " Hz, overshoot " << format_double(b.overshoot_hz) << " Hz";
        if (b.unsafe_at_start)
            os << ", unsafe at start, entry " << format_double(b.entry_time) << " s, monotone "
               << (b.monotone ? "yes" : "no");
        os << '\n';
    }
    os << "audit safety    " << verdict(r.safety_audit) << "  " << r.safety_audit.detail << '\n';
    os << "audit lyapunov  " << verdict(r.lyapunov_audit) << "  " << r.lyapunov_audit.detail << '\n';
    os << "audit locality  " << verdict(r.locality_audit) << "  " << r.locality_audit.detail << '\n';
}

namespace {

nlohmann::ordered_json report_json(const RunReport& r) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["case"] = r.case_name;
    j["mode"] = to_string(r.mode);
    j["backend"] = to_string(r.backend);
    j["cost"] = r.cost;
    j["min_hz"] = r.min_hz;
    j["max_hz"] = r.max_hz;
    j["settling_time"] = r.settling_time;
    ordered_json buses = ordered_json::array();
    for (const BusSafety& b : r.safety.buses)
        buses.push_back({{"bus", b.bus},
                         {"min_hz", b.min_hz},
                         {"max_hz", b.max_hz},
                         {"overshoot_hz", b.overshoot_hz},
                         {"unsafe_at_start", b.unsafe_at_start},
                         {"entry_time", b.entry_time},
                         {"monotone", b.monotone}});
    j["safety"] = buses;
    j["filter_excess"] = r.invariants.worst_filter_excess;
    j["max_omega_alpha_tl"] = r.invariants.worst_sign;
    ordered_json audits;
    auto put = [&](const char* name, const AuditSummary& a) {
        if (a.requested) audits[name] = {{"pass", a.pass}, {"detail", a.detail}};
    };
    put("safety", r.safety_audit);
    put("lyapunov", r.lyapunov_audit);
    put("locality", r.locality_audit);
    j["audits"] = audits.is_null() ? ordered_json::object() : audits;
    j["pass"] = r.audits_pass();
    return j;
}

} // namespace

void write_report_json(std::ostream& os, const RunReport& r) { os << report_json(r).dump(2) << '\n'; }

void write_comparison_text(std::ostream& os, const Comparison& c) {
    auto line = [&](const char* name, double a, double b) {
        os << name << "  " << format_double(a) << "  " << format_double(b) << '\n';
    };
    os << "metric        A  B\n";
    os << "mode          " << to_string(c.a.mode) << "  " << to_string(c.b.mode) << '\n';
    line("cost        ", c.a.cost, c.b.cost);
    line("min_hz      ", c.a.min_hz, c.b.min_hz);
    line("max_hz      ", c.a.max_hz, c.b.max_hz);
    line("overshoot_hz", c.a.safety.worst_overshoot_hz, c.b.safety.worst_overshoot_hz);
    line("settling_s  ", c.a.settling_time, c.b.settling_time);
    os << "lower cost    " << (c.a.cost < c.b.cost ? "A" : c.b.cost < c.a.cost ? "B" : "tie") << '\n';
}

} // namespace swingsafe

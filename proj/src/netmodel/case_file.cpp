#include "swingsafe/case_file.hpp"

#include "swingsafe/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace swingsafe {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const char* where) {
    if (!obj.is_object() || !obj.contains(key))
        throw SchemaError(std::string("missing field '") + key + "' in " + where);
    return obj.at(key);
}

double number(const json& v, const char* what) {
    if (!v.is_number()) throw SchemaError(std::string("field '") + what + "' must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return number(obj.at(key), key);
}

class LabelMap {
public:
    explicit LabelMap(const std::vector<int>& labels) {
        for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
            if (!index_.emplace(labels[i], i).second)
                throw SchemaError("duplicate bus id " + std::to_string(labels[i]));
        }
    }
    int at(const json& id) const {
        if (!id.is_number_integer()) throw SchemaError("bus ids must be integers");
        auto it = index_.find(id.get<int>());
        if (it == index_.end()) throw SchemaError("unknown bus id " + id.dump());
        return it->second;
    }
    std::vector<int> set(const json& arr, const char* what) const {
        if (!arr.is_array()) throw SchemaError(std::string(what) + " must be an array of bus ids");
        std::vector<int> out;
        for (const auto& v : arr) out.push_back(at(v));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    std::map<int, int> index_;
};

DisturbanceProfile parse_disturbance(const json& j, const LabelMap& ids) {
    if (j.is_null()) return {};
    DisturbanceProfile d;
    const std::vector<int> buses = j.contains("buses") ? ids.set(j.at("buses"), "disturbance.buses")
                                                       : std::vector<int>{};
    const std::string profile = j.value("profile", std::string("segments"));
    if (profile == "standard") {
        d = DisturbanceProfile::standard(number_or(j, "amplitude", 0.2), buses);
    } else if (profile == "none") {
        d.buses = buses;
    } else if (profile == "segments") {
        const json& segs = require(j, "segments", "disturbance");
        if (!segs.is_array()) throw SchemaError("disturbance.segments must be an array");
        double last_end = 0.0;
        for (const auto& s : segs) {
            DisturbanceSegment seg;
            seg.end = number(require(s, "end", "disturbance segment"), "end");
            seg.offset = number_or(s, "offset", 0.0);
            seg.amplitude = number_or(s, "amplitude", 0.0);
            seg.rate = number_or(s, "rate", 0.0);
            seg.phase_time = number_or(s, "phase_time", 0.0);
            if (seg.end < last_end) throw SchemaError("disturbance segments must be ordered by end");
            last_end = seg.end;
            d.segments.push_back(seg);
        }
        d.buses = buses;
    } else {
        throw SchemaError("unknown disturbance profile '" + profile + "'");
    }
    return d;
}

void apply_controller(const json& j, const PowerNetwork& net, const LabelMap& ids,
                      ControllerConfig& c) {
    if (j.is_null()) return;
    const int n = net.n_buses();
    auto fill_safety = [&](Eigen::VectorXd& v, const char* key, bool hz) {
        if (!j.contains(key)) return;
        const double x = number(j.at(key), key);
        v = Eigen::VectorXd::Constant(n, hz ? hz_to_rad(x) : x);
    };
    fill_safety(c.omega_max, "omega_max_hz", true);
    fill_safety(c.omega_min, "omega_min_hz", true);
    fill_safety(c.omega_max_thr, "omega_max_thr_hz", true);
    fill_safety(c.omega_min_thr, "omega_min_thr_hz", true);
    fill_safety(c.epsilon, "epsilon", false);
    fill_safety(c.tau, "tau", false);
    fill_safety(c.violation_weight, "d", false);
    if (j.contains("gamma")) {
        const double g = number(j.at("gamma"), "gamma");
        c.gamma_min.setConstant(g);
        c.gamma_max.setConstant(g);
    }
    if (j.contains("c_safety") || j.contains("c_other")) {
        const double cs = number_or(j, "c_safety", 4.0);
        const double co = number_or(j, "c_other", 1.0);
        for (int i = 0; i < n; ++i) c.cost_weight[i] = net.is_safety(i) ? cs : co;
    }
    c.horizon = number_or(j, "horizon_s", c.horizon);
    c.step = number_or(j, "step_s", c.step);
    c.sampling_period = number_or(j, "sampling_s", c.sampling_period);
    if (j.contains("per_bus")) {
        for (const auto& o : j.at("per_bus")) {
            const int i = ids.at(require(o, "id", "controller.per_bus"));
            if (o.contains("d")) c.violation_weight[i] = number(o.at("d"), "d");
            if (o.contains("c")) c.cost_weight[i] = number(o.at("c"), "c");
            if (o.contains("epsilon")) c.epsilon[i] = number(o.at("epsilon"), "epsilon");
            if (o.contains("tau")) c.tau[i] = number(o.at("tau"), "tau");
        }
    }
}

Eigen::VectorXd per_bus_values(const json& arr, const LabelMap& ids, int n, double scale,
                               const char* what) {
    if (!arr.is_array()) throw SchemaError(std::string(what) + " must be an array");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (const auto& e : arr) {
        const int i = ids.at(require(e, "id", what));
        v[i] = scale * number(require(e, "value", what), "value");
    }
    return v;
}

CaseData parse(const json& root) {
    CaseData out;
    const json& version = require(root, "version", "case file");
    if (!version.is_number_integer() || version.get<int>() != kCaseFileVersion)
        throw SchemaError("unsupported case file version " + version.dump() + " (expected " +
                          std::to_string(kCaseFileVersion) + ")");
    out.name = root.value("name", std::string("unnamed"));

    const json& buses = require(root, "buses", "case file");
    if (!buses.is_array() || buses.empty()) throw SchemaError("buses must be a non-empty array");
    PowerNetwork& net = out.network;
    const int n = static_cast<int>(buses.size());
    net.inertia.resize(n);
    net.damping.resize(n);
    net.injection.resize(n);
    for (int i = 0; i < n; ++i) {
        const json& b = buses[i];
        const json& id = require(b, "id", "bus");
        if (!id.is_number_integer()) throw SchemaError("bus ids must be integers");
        net.labels.push_back(id.get<int>());
        net.inertia[i] = number(require(b, "inertia", "bus"), "inertia");
        net.damping[i] = number(require(b, "damping", "bus"), "damping");
        net.injection[i] = number(require(b, "injection", "bus"), "injection");
    }
    const LabelMap ids(net.labels);

    const json& edges = require(root, "edges", "case file");
    if (!edges.is_array()) throw SchemaError("edges must be an array");
    for (const auto& e : edges) {
        Line l;
        l.pos = ids.at(require(e, "from", "edge"));
        l.neg = ids.at(require(e, "to", "edge"));
        l.susceptance = number(require(e, "susceptance", "edge"), "susceptance");
        net.lines.push_back(l);
    }

    const json& sets = require(root, "sets", "case file");
    net.controlled = ids.set(require(sets, "controlled", "sets"), "sets.controlled");
    net.safety = ids.set(require(sets, "safety", "sets"), "sets.safety");

    const bool rebalance = root.value("rebalance", false);
    if (rebalance) {
        const double mismatch = net.injection.sum();
        net.injection.array() -= mismatch / n;
    }
    validate(net);

    ScenarioConfig& sc = out.scenario;
    sc.controller = ControllerConfig::defaults(net);
    const json scen = root.value("scenario", json::object());
    if (!scen.is_object()) throw SchemaError("scenario must be an object");
    sc.t_end = number_or(scen, "t_end", sc.t_end);
    sc.dt = number_or(scen, "dt", sc.dt);
    if (scen.contains("output_stride")) sc.output_stride = scen.at("output_stride").get<int>();
    sc.shift = number_or(scen, "shift", sc.shift);
    sc.controller_start = number_or(scen, "controller_start", sc.controller_start);
    if (scen.contains("mode")) sc.mode = parse_control_mode(scen.at("mode").get<std::string>());
    if (scen.contains("backend")) sc.backend = parse_backend(scen.at("backend").get<std::string>());
    if (scen.contains("seed")) sc.seed = scen.at("seed").get<std::uint64_t>();
    if (scen.contains("disturbance")) sc.disturbance = parse_disturbance(scen.at("disturbance"), ids);
    if (scen.contains("forecast")) {
        const std::string f = scen.at("forecast").get<std::string>();
        if (f == "perfect") sc.controller.forecast = ForecastMode::Perfect;
        else if (f == "hold-current") sc.controller.forecast = ForecastMode::HoldCurrent;
        else throw SchemaError("forecast must be 'perfect' or 'hold-current'");
    }
    if (scen.contains("controller")) apply_controller(scen.at("controller"), net, ids, sc.controller);
    if (scen.contains("saddle")) {
        const json& s = scen.at("saddle");
        sc.saddle.step = number_or(s, "step", sc.saddle.step);
        sc.saddle.gains.primal = number_or(s, "gain_primal", sc.saddle.gains.primal);
        sc.saddle.gains.ineq = number_or(s, "gain_ineq", sc.saddle.gains.ineq);
        sc.saddle.gains.eq = number_or(s, "gain_eq", sc.saddle.gains.eq);
        sc.saddle.kkt_tol = number_or(s, "kkt_tol", sc.saddle.kkt_tol);
        if (s.contains("max_rounds")) sc.saddle.max_rounds = s.at("max_rounds").get<long>();
        if (s.contains("limit_step")) sc.saddle.limit_step = s.at("limit_step").get<bool>();
    }
    if (scen.contains("initial")) {
        const json& init = scen.at("initial");
        if (init.contains("omega_hz"))
            sc.omega0 = per_bus_values(init.at("omega_hz"), ids, n, kTwoPi, "initial.omega_hz");
        if (init.contains("alpha_bl"))
            sc.alpha_bl0 = per_bus_values(init.at("alpha_bl"), ids, n, 1.0, "initial.alpha_bl");
    }
    try {
        validate(sc, net);
    } catch (const ConfigError& e) {
        throw SchemaError(std::string("invalid scenario: ") + e.what());
    }
    return out;
}

} // namespace

CaseData parse_case(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("case file is not valid JSON: ") + e.what());
    }
    try {
        return parse(root);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("case file has a field of the wrong type: ") + e.what());
    }
}

CaseData load_case(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open case file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_case(ss.str());
}

} // namespace swingsafe

// swingsafe command line: scenario runs, comparisons and QP utilities.

#include "swingsafe/case_file.hpp"
#include "swingsafe/errors.hpp"
#include "swingsafe/locality.hpp"
#include "swingsafe/simulate.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace swingsafe;

namespace {

struct ScenarioFlags {
    std::string case_path;
    std::string mode;
    std::string backend;
    double t_end = 0.0;
    double dt = 0.0;
};

void add_scenario_flags(CLI::App* app, ScenarioFlags& f, bool with_mode = true) {
    app->add_option("--case", f.case_path, "case file (JSON)")->required()->check(CLI::ExistingFile);
    if (with_mode)
        app->add_option("--mode", f.mode, "open-loop | top-only | bilayered | bilayered-shift");
    app->add_option("--backend", f.backend, "reference | saddle-central | saddle-distributed");
    app->add_option("--t-end", f.t_end, "simulated horizon in seconds");
    app->add_option("--dt", f.dt, "integrator step in seconds");
}

ScenarioConfig apply_flags(ScenarioConfig sc, const ScenarioFlags& f, const PowerNetwork& net) {
    if (!f.mode.empty()) sc.mode = parse_control_mode(f.mode);
    if (!f.backend.empty()) sc.backend = parse_backend(f.backend);
    if (f.t_end > 0.0) sc.t_end = f.t_end;
    if (f.dt > 0.0) sc.dt = f.dt;
    validate(sc, net);
    return sc;
}

fs::path out_dir(const std::string& flag) {
    fs::path dir = flag;
    if (dir.empty()) {
        const char* env = std::getenv("SWINGSAFE_OUT_DIR");
        dir = env && *env ? env : "out";
    }
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    return os;
}

int cmd_run(const ScenarioFlags& f, const std::string& dir_flag, const std::vector<std::string>& audits) {
    const CaseData data = load_case(f.case_path);
    const ScenarioConfig sc = apply_flags(data.scenario, f, data.network);
    const fs::path dir = out_dir(dir_flag);
    SimulationResult sim;
    const RunReport rep = run_scenario(data, sc, parse_audits(audits), &sim);
    {
        auto os = open_out(dir / "trajectory.csv");
        write_trajectory_csv(os, data.network, sim.trajectory, sc.controller);
    }
    {
        auto os = open_out(dir / "audit.txt");
        write_report_text(os, rep);
    }
    {
        auto os = open_out(dir / "audit.json");
        write_report_json(os, rep);
    }
    write_report_text(std::cout, rep);
    std::cout << "outputs in " << dir.string() << '\n';
    return rep.audits_pass() ? 0 : 1;
}

int cmd_compare(const ScenarioFlags& a, const std::string& case_b, const std::string& mode_b,
                const std::string& dir_flag) {
    const CaseData da = load_case(a.case_path);
    const CaseData db = case_b.empty() ? da : load_case(case_b);
    const ScenarioConfig sa = apply_flags(da.scenario, a, da.network);
    ScenarioFlags fb = a;
    fb.mode = mode_b;
    const ScenarioConfig sb = apply_flags(db.scenario, fb, db.network);
    const Comparison c = compare_scenarios(da, sa, db, sb);
    const fs::path dir = out_dir(dir_flag);
    {
        auto os = open_out(dir / "comparison.txt");
        write_comparison_text(os, c);
    }
    write_comparison_text(std::cout, c);
    return 0;
}

int cmd_solve_qp(const std::string& dump, const std::string& backend_name, const std::string& dir_flag,
                 long max_rounds, double tol) {
    const QpInstance qp = load_qp(dump);
    const SolverBackend backend = parse_backend(backend_name.empty() ? "reference" : backend_name);
    const fs::path dir = out_dir(dir_flag);
    ReferenceOptions ropt;
    QpSolution ref = solve_qp_reference(qp, ropt);
    Eigen::VectorXd y = ref.y;
    KktResidual kkt = ref.kkt;
    std::cout << "reference: " << ref.iterations << " iterations\n";
    if (backend != SolverBackend::Reference) {
        SaddleOptions opts;
        opts.kkt_tol = tol;
        opts.max_rounds = max_rounds;
        opts.trace_every = 100;
        opts.require_convergence = false;
        SaddleResult res;
        if (backend == SolverBackend::SaddleCentral) {
            res = saddle_integrate(qp, SaddleState::zeros(qp), opts, &ref.y);
        } else {
            DistributedResult d = distributed_execute(qp, make_agents(qp), SaddleState::zeros(qp), opts, &ref.y);
            res = std::move(d.result);
            std::cout << "locality: " << d.log.records.size() << " agent pairs, max primal read distance "
                      << d.log.max_primal_distance << ", max dual read distance "
                      << d.log.max_dual_distance << '\n';
        }
        auto os = open_out(dir / "convergence.csv");
        write_trace_csv(os, res.trace);
        y = res.state.z;
        kkt = res.kkt;
        const double gap = (y - ref.y).norm() / std::max(1.0, ref.y.norm());
        std::cout << to_string(backend) << ": " << res.rounds << " rounds, step "
                  << format_double(res.step) << (res.converged ? ", converged" : ", budget exhausted")
                  << "\nrelative gap to reference " << format_double(gap) << '\n';
        if (!res.converged) {
            std::cout << "KKT residual " << format_double(kkt.max()) << " above tolerance\n";
            throw NoConvergence("saddle-point iteration did not reach the KKT tolerance");
        }
    }
    std::cout << "objective " << format_double(objective(qp, y)) << '\n'
              << "stationarity " << format_double(kkt.stationarity) << '\n'
              << "primal_ineq " << format_double(kkt.primal_ineq) << '\n'
              << "primal_eq " << format_double(kkt.primal_eq) << '\n'
              << "complementarity " << format_double(kkt.complementarity) << '\n';
    auto os = open_out(dir / "solution.csv");
    os << "index,value\n";
    for (Eigen::Index i = 0; i < y.size(); ++i) os << i << ',' << format_double(y[i]) << '\n';
    std::cout << "solution written to " << (dir / "solution.csv").string() << '\n';
    return 0;
}

int cmd_check_case(const std::string& path) {
    const CaseData data = load_case(path);
    const PowerNetwork& net = data.network;
    const EquilibriumCheck eq = check_equilibrium_condition(net);
    std::cout << "case " << data.name << ": " << net.n_buses() << " buses, " << net.n_lines()
              << " lines, " << net.controlled.size() << " controlled, " << net.safety.size()
              << " with frequency bounds\n";
    std::cout << "equilibrium condition " << format_double(eq.value) << (eq.holds ? " < 1, holds\n" : " >= 1, fails\n");
    if (!eq.holds) return 1;
    const Eigen::VectorXd lam = compute_equilibrium(net);
    std::cout << "max |lambda_eq| " << format_double(lam.cwiseAbs().maxCoeff()) << " rad\n";
    std::cout << "level set constant " << format_double(level_set_constant(net, lam)) << '\n';
    const LocalityReport loc = scenario_locality(net, data.scenario);
    std::cout << "locality: " << loc.rows_checked << " rows, max row radius " << loc.max_row_radius
              << ", max Hessian distance " << loc.max_hessian_distance << '\n';
    return 0;
}

int cmd_dump_qp(const ScenarioFlags& f, const std::string& out) {
    const CaseData data = load_case(f.case_path);
    const ScenarioConfig sc = apply_flags(data.scenario, f, data.network);
    const QpInstance qp = scenario_program(data.network, sc);
    if (out.empty() || out == "-") {
        write_qp(std::cout, qp);
    } else {
        save_qp(out, qp);
        std::cout << "wrote " << qp.dim() << " variables, " << qp.n_ineq() << " inequalities, "
                  << qp.n_eq() << " equalities to " << out << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bilayered frequency control simulator for swing-equation networks"};
    app.require_subcommand(1);
    std::string dir_flag;
    std::vector<std::string> audits;

    ScenarioFlags run_f;
    auto* run = app.add_subcommand("run", "simulate a scenario and audit it");
    add_scenario_flags(run, run_f);
    run->add_option("--out-dir", dir_flag, "output directory (default $SWINGSAFE_OUT_DIR or ./out)");
    run->add_option("--audit", audits, "safety | lyapunov | locality | all")->take_all();

    ScenarioFlags cmp_f;
    std::string case_b, mode_b;
    auto* cmp = app.add_subcommand("compare", "compare two control modes on the same scenario");
    add_scenario_flags(cmp, cmp_f);
    cmp->add_option("--case-b", case_b, "case file of the second scenario (default: --case)");
    cmp->add_option("--mode-b", mode_b, "control mode of the second scenario")->required();
    cmp->add_option("--out-dir", dir_flag, "output directory");

    std::string dump, backend;
    long max_rounds = 2'000'000;
    double tol = 1e-9;
    auto* solve = app.add_subcommand("solve-qp", "solve a dumped QP");
    solve->add_option("dump", dump, "QP dump file")->required();
    solve->add_option("--backend", backend, "reference | saddle-central | saddle-distributed");
    solve->add_option("--max-rounds", max_rounds, "saddle-point round budget");
    solve->add_option("--kkt-tol", tol, "saddle-point KKT tolerance");
    solve->add_option("--out-dir", dir_flag, "output directory");

    std::string check_path;
    auto* check = app.add_subcommand("check-case", "validate a case file");
    check->add_option("--case", check_path, "case file")->required()->check(CLI::ExistingFile);

    ScenarioFlags dump_f;
    std::string dump_out;
    auto* dq = app.add_subcommand("dump-qp", "write the MPC program at t = 0");
    add_scenario_flags(dq, dump_f, false);
    dq->add_option("--out", dump_out, "output file ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(run_f, dir_flag, audits);
        if (*cmp) return cmd_compare(cmp_f, case_b, mode_b, dir_flag);
        if (*solve) return cmd_solve_qp(dump, backend, dir_flag, max_rounds, tol);
        if (*check) return cmd_check_case(check_path);
        if (*dq) return cmd_dump_qp(dump_f, dump_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

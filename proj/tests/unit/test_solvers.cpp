#include "../support/fixtures.hpp"

#include "swingsafe/errors.hpp"
#include "swingsafe/simulate.hpp"
#include "swingsafe/solvers.hpp"

#include <doctest.h>

#include <sstream>

using namespace swingsafe;

namespace {

SparseMatrix sparse(const Eigen::MatrixXd& m) {
    SparseMatrix s = m.sparseView();
    s.makeCompressed();
    return s;
}

QpInstance make_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& f, const Eigen::MatrixXd& R1,
                   const Eigen::VectorXd& r1, const Eigen::MatrixXd& R2, const Eigen::VectorXd& r2) {
    QpInstance qp;
    qp.H = sparse(H);
    qp.f = f;
    qp.R1 = sparse(R1);
    qp.r1 = r1;
    qp.R2 = sparse(R2);
    qp.r2 = r2;
    qp.assign_single_agent();
    check_dimensions(qp);
    return qp;
}

// min (y - 1)^2  s.t.  y <= 0
QpInstance shifted_square() {
    QpInstance qp = make_qp(Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, -2.0),
                            Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1), Eigen::MatrixXd(0, 1),
                            Eigen::VectorXd(0));
    qp.constant = 1.0;
    return qp;
}

// Small MPC program on the bundled four-bus case.
QpInstance four_bus_program(int horizon = 5) {
    const CaseData four = testing::load_fixture("four_bus.json");
    const PowerNetwork& net = four.network;
    const ControllerConfig& cfg = four.scenario.controller;
    const DiscreteModel dm = discretize_backward_euler(linearize(net, cfg.tau), cfg.step, horizon);
    SystemState x = equilibrium_state(net, compute_equilibrium(net));
    x.omega = Eigen::Vector4d(-1.0, -0.9, 0.0, -1.1);
    x.alpha_bl = Eigen::Vector4d(0.3, 0.2, 0.0, 0.4);
    const std::vector<Eigen::VectorXd> fc(horizon, injection_at(net, four.scenario.disturbance, 60.0));
    return assemble_mpc_qp(dm, net, cfg, x, fc);
}

double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& ref) {
    return (a - ref).norm() / std::max(1.0, ref.norm());
}

} // namespace

TEST_CASE("KKT residuals") {
    const QpInstance qp = shifted_square();
    const KktResidual at = kkt_residual(qp, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 2.0),
                                        Eigen::VectorXd(0));
    CHECK(at.max() <= 1e-12);
    const KktResidual off = kkt_residual(qp, Eigen::VectorXd::Constant(1, -0.7), Eigen::VectorXd::Constant(1, 0.3),
                                         Eigen::VectorXd(0));
    CHECK(off.stationarity > 0.0);
    CHECK(objective(qp, Eigen::VectorXd::Zero(1)) == 1.0);
}

TEST_CASE("reference solver on closed-form problems") {
    Eigen::Matrix2d H{{3.0, 1.0}, {1.0, 2.0}};
    Eigen::Vector2d f(1.0, -1.0);
    const QpInstance free = make_qp(H, f, Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), Eigen::MatrixXd(0, 2),
                                    Eigen::VectorXd(0));
    CHECK(rel_err(solve_qp_reference(free).y, -H.inverse() * f) <= 1e-10);

    const QpSolution s = solve_qp_reference(shifted_square());
    CHECK(std::abs(s.y[0]) <= 1e-9);
    CHECK(s.eta[0] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("reference solver matches active-set enumeration") {
    // 3 variables, one equality, one inequality that binds.
    Eigen::Matrix3d H{{4.0, 1.0, 0.0}, {1.0, 3.0, 0.5}, {0.0, 0.5, 2.0}};
    Eigen::Vector3d f(-1.0, -4.0, 2.0);
    Eigen::RowVector3d a(1.0, 1.0, 1.0);
    Eigen::RowVector3d g(0.0, 1.0, -1.0);
    const double b = 1.0, h = 0.2;
    const QpInstance qp = make_qp(H, f, g, Eigen::VectorXd::Constant(1, h), a, Eigen::VectorXd::Constant(1, b));

    Eigen::Vector3d best;
    int found = 0;
    for (int active = 0; active <= 1; ++active) {
        const int k = 1 + active;
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(3 + k, 3 + k);
        Eigen::VectorXd rhs(3 + k);
        K.topLeftCorner(3, 3) = H;
        K.block(3, 0, 1, 3) = a;
        K.block(0, 3, 3, 1) = a.transpose();
        rhs << -f, b;
        if (active) {
            K.block(4, 0, 1, 3) = g;
            K.block(0, 4, 3, 1) = g.transpose();
            rhs[4] = h;
        }
        const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
        const Eigen::Vector3d y = sol.head(3);
        const bool primal_ok = g.dot(y) <= h + 1e-12;
        const bool dual_ok = !active || sol[4] >= -1e-12;
        if (primal_ok && dual_ok && (active || g.dot(y) < h)) {
            best = y;
            ++found;
        }
    }
    REQUIRE(found == 1);
    const QpSolution s = solve_qp_reference(qp);
    CHECK(s.kkt.max() <= 1e-9);
    CHECK((s.y - best).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK(g.dot(s.y) == doctest::Approx(h)); // the constraint binds
}

TEST_CASE("reference solver reports infeasible equalities") {
    Eigen::MatrixXd R2(2, 1);
    R2 << 1.0, 1.0;
    const QpInstance qp = make_qp(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1), Eigen::MatrixXd(0, 1),
                                  Eigen::VectorXd(0), R2, Eigen::Vector2d(1.0, 2.0));
    CHECK_THROWS_AS(solve_qp_reference(qp), NoConvergence);
    SaddleOptions opts;
    opts.max_rounds = 2000;
    CHECK_THROWS_AS(saddle_integrate(qp, SaddleState::zeros(qp), opts), NoConvergence);
}

TEST_CASE("saddle right-hand side") {
    // y <= 3 at y = 0 has residual -3.
    const QpInstance qp = make_qp(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1),
                                  Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Constant(1, 3.0),
                                  Eigen::MatrixXd(0, 1), Eigen::VectorXd(0));
    const SaddleGains unit{1.0, 1.0, 1.0};
    SaddleState s = SaddleState::zeros(qp);
    CHECK(saddle_rhs(qp, s, unit).deta[0] == 0.0);
    s.eta[0] = 0.5;
    CHECK(saddle_rhs(qp, s, unit).deta[0] == -3.0);

    const QpInstance mpc = four_bus_program(3);
    const QpSolution ref = solve_qp_reference(mpc);
    // Interior-point multipliers of inactive rows are tiny but positive.
    Eigen::VectorXd eta = ref.eta;
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        if (eta[i] < 1e-7) eta[i] = 0.0;
    const SaddleDerivative d = saddle_rhs(mpc, {ref.y, eta, ref.mu}, unit);
    CHECK(d.dz.lpNorm<Eigen::Infinity>() <= 1e-7);
    CHECK(d.dmu.lpNorm<Eigen::Infinity>() <= 1e-7);
    CHECK(d.deta.lpNorm<Eigen::Infinity>() <= 1e-7);
}

TEST_CASE("saddle integration") {
    const QpInstance qp = shifted_square();
    SaddleOptions opts;
    opts.kkt_tol = 1e-9;
    SaddleState start = SaddleState::zeros(qp);
    start.z[0] = 1.0;
    const SaddleResult r = saddle_integrate(qp, start, opts);
    CHECK(r.converged);
    CHECK(std::abs(r.state.z[0]) <= 1e-8);

    const QpInstance mpc = four_bus_program();
    const QpSolution ref = solve_qp_reference(mpc);
    opts.kkt_tol = 1e-8;
    opts.max_rounds = 2'000'000;
    opts.trace_every = 1000;
    const SaddleResult m = saddle_integrate(mpc, SaddleState::zeros(mpc), opts, &ref.y);
    CHECK(m.converged);
    CHECK(rel_err(m.state.z, ref.y) <= 1e-4);
    REQUIRE_FALSE(m.trace.empty());
    CHECK(m.trace.back().oracle_distance <= m.trace.front().oracle_distance);
}

TEST_CASE("saddle flow is invariant under time rescaling") {
    const QpInstance qp = four_bus_program(3);
    SaddleOptions a;
    a.limit_step = false;
    a.step = 1e-6;
    a.max_rounds = 3000;
    a.kkt_tol = 0.0;
    a.require_convergence = false;
    SaddleOptions b = a;
    b.step = 2e-6;
    b.gains = {2.0 * a.gains.primal, 2.0 * a.gains.ineq, 2.0 * a.gains.eq};
    const SaddleResult ra = saddle_integrate(qp, SaddleState::zeros(qp), a);
    const SaddleResult rb = saddle_integrate(qp, SaddleState::zeros(qp), b);
    CHECK(ra.state.z == rb.state.z);
    CHECK(ra.state.eta == rb.state.eta);
    CHECK(ra.state.mu == rb.state.mu);
}

TEST_CASE("distributed execution reproduces the centralized iterates") {
    const QpInstance qp = four_bus_program();
    SaddleOptions opts;
    opts.kkt_tol = 1e-7;
    opts.max_rounds = 1'000'000;
    const SaddleResult c = saddle_integrate(qp, SaddleState::zeros(qp), opts);
    const DistributedResult d = distributed_execute(qp, make_agents(qp), SaddleState::zeros(qp), opts);
    CHECK(c.rounds == d.result.rounds);
    CHECK(c.state.z == d.result.state.z);
    CHECK(c.state.eta == d.result.state.eta);
    CHECK(c.state.mu == d.result.state.mu);
    CHECK(d.log.max_primal_distance <= 2);
    CHECK(d.log.max_dual_distance <= 1);
    for (const MessageRecord& m : d.log.records) CHECK(m.distance <= 2);

    std::vector<AgentPlan> agents = make_agents(qp);
    agents.erase(agents.begin() + 1);
    CHECK_THROWS_AS(distributed_execute(qp, agents, SaddleState::zeros(qp), opts), OwnershipGap);
    agents = make_agents(qp);
    agents[0].primal.push_back(agents[1].primal.front());
    CHECK_THROWS_AS(distributed_execute(qp, agents, SaddleState::zeros(qp), opts), OwnershipGap);
}

TEST_CASE("distributed run on random programs") {
    for (std::uint64_t seed = 30; seed <= 33; ++seed) {
        const QpInstance qp = testing::random_mpc_case(seed, MpcObjective::Augmented, 5, 4).qp;
        const QpSolution ref = solve_qp_reference(qp);
        SaddleOptions opts;
        opts.kkt_tol = 1e-8;
        opts.max_rounds = 2'000'000;
        const DistributedResult d = distributed_execute(qp, make_agents(qp), SaddleState::zeros(qp), opts);
        CHECK(rel_err(d.result.state.z, ref.y) <= 1e-4);
    }
}

TEST_CASE("QP dump round trip") {
    const QpInstance qp = four_bus_program(3);
    std::stringstream ss;
    write_qp(ss, qp);
    const QpInstance back = read_qp(ss);
    CHECK(Eigen::MatrixXd(back.H) == Eigen::MatrixXd(qp.H));
    CHECK(Eigen::MatrixXd(back.R1) == Eigen::MatrixXd(qp.R1));
    CHECK(Eigen::MatrixXd(back.R2) == Eigen::MatrixXd(qp.R2));
    CHECK(back.f == qp.f);
    CHECK(back.r1 == qp.r1);
    CHECK(back.r2 == qp.r2);
    CHECK(back.constant == qp.constant);
    CHECK(back.owner == qp.owner);
    CHECK(back.ineq_owner == qp.ineq_owner);
    CHECK(back.eq_owner == qp.eq_owner);
    CHECK(back.edge_ends == qp.edge_ends);

    std::string text = ss.str();
    std::stringstream truncated(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(read_qp(truncated), SchemaError);
    std::stringstream wrong("# not a dump\n");
    CHECK_THROWS_AS(read_qp(wrong), SchemaError);
}

#include "../support/fixtures.hpp"

#include "swingsafe/errors.hpp"
#include "swingsafe/locality.hpp"
#include "swingsafe/simulate.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

using namespace swingsafe;

namespace {

PowerNetwork hand_two_bus() {
    PowerNetwork net;
    net.labels = {1, 2};
    net.lines = {{0, 1, 1.5}};
    net.inertia = Eigen::Vector2d(2.0, 3.0);
    net.damping = Eigen::Vector2d(0.2, 0.4);
    net.injection = Eigen::Vector2d(0.3, -0.3);
    net.controlled = {0, 1};
    net.safety = {0};
    validate(net);
    return net;
}

LinearModel scalar_model() {
    LinearModel lm;
    lm.m = 1;
    lm.n = 0;
    lm.G = SparseMatrix(1, 1);
    lm.G.insert(0, 0) = 1.0;
    lm.A = SparseMatrix(1, 1);
    lm.A.insert(0, 0) = -1.0;
    lm.B1 = SparseMatrix(1, 0);
    lm.B2 = SparseMatrix(1, 0);
    return lm;
}

Eigen::MatrixXd dense(const SparseMatrix& s) { return Eigen::MatrixXd(s); }

} // namespace

TEST_CASE("linearization of a two-bus network") {
    const PowerNetwork net = hand_two_bus();
    const Eigen::Vector2d tau(0.5, 0.25);
    const LinearModel lm = linearize(net, tau);
    // State (lambda, w1, w2, a1, a2).
    Eigen::MatrixXd G(5, 5), A(5, 5), B1(5, 2), B2(5, 2);
    G = Eigen::Vector<double, 5>(1, 2, 3, 2, 3).asDiagonal();
    A << 0, 1, -1, 0, 0,
        -1.5, -0.2, 0, 1, 0,
        1.5, 0, -0.4, 0, 1,
        0, -1, 0, -2, 0,
        0, 0, -1, 0, -4;
    B1 << 0, 0, 1, 0, 0, 1, 0, 0, 0, 0;
    B2 << 0, 0, 0, 0, 0, 0, 1, 0, 0, 1;
    CHECK(dense(lm.G) == G);
    CHECK(dense(lm.A) == A);
    CHECK(dense(lm.B1) == B1);
    CHECK(dense(lm.B2) == B2);
}

TEST_CASE("linear model sparsity follows the network") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const PowerNetwork net = testing::random_network(6, seed, true);
        const LinearModel lm = linearize(net, Eigen::VectorXd::Constant(6, 0.5));
        const Eigen::MatrixXd l = weighted_laplacian(net);
        // Entry (r, c) may only couple a row and a column of the same or
        // adjacent buses / incident lines.
        auto bus_of = [&](int idx, std::vector<int>& out) {
            out.clear();
            if (idx < lm.m) {
                out = {net.lines[idx].pos, net.lines[idx].neg};
            } else {
                out = {(idx - lm.m) % lm.n};
            }
        };
        std::vector<int> a, b;
        bool local = true;
        for (int k = 0; k < lm.A.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(lm.A, k); it; ++it) {
                bus_of(static_cast<int>(it.row()), a);
                bus_of(static_cast<int>(it.col()), b);
                bool near = false;
                for (int x : a)
                    for (int y : b) near = near || x == y || l(x, y) != 0.0;
                local = local && near;
            }
        CHECK(local);
        // B1 touches omega rows only.
        for (int k = 0; k < lm.B1.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(lm.B1, k); it; ++it) {
                CHECK(it.row() >= lm.m);
                CHECK(it.row() < lm.m + lm.n);
            }
    }
}

TEST_CASE("scalar discretizations") {
    const LinearModel lm = scalar_model();
    const DiscreteModel be = discretize_backward_euler(lm, 0.2);
    CHECK(dense(be.F)(0, 0) == doctest::Approx(1.2));
    CHECK(dense(be.A)(0, 0) == 1.0);
    const DiscreteModel fe = discretize_forward_euler(lm, 0.2);
    CHECK(dense(fe.F)(0, 0) == 1.0);
    CHECK(dense(fe.A)(0, 0) == doctest::Approx(0.8));
}

TEST_CASE("backward Euler sparsity matches G - T A") {
    const PowerNetwork net = testing::random_network(5, 4, true);
    const LinearModel lm = linearize(net, Eigen::VectorXd::Constant(5, 0.5));
    const DiscreteModel be = discretize_backward_euler(lm, 0.2);
    const Eigen::MatrixXd ref = dense(lm.G) - 0.2 * dense(lm.A);
    CHECK(((dense(be.F).array() != 0.0) == (ref.array() != 0.0)).all());
}

TEST_CASE("spectral radius") {
    DiscreteModel id;
    id.m = 2;
    id.F = SparseMatrix(2, 2);
    id.F.setIdentity();
    id.A = id.F;
    const SpectralCheck s = spectral_stability_check(id);
    CHECK(s.radius == doctest::Approx(1.0));
    CHECK(s.stable);

    for (const char* name : {"four_bus.json", "two_bus.json", "ieee39_topology.json"}) {
        const CaseData c = testing::load_fixture(name);
        const LinearModel lm = linearize(c.network, c.scenario.controller.tau);
        for (double T : {0.05, 0.2, 1.0, 5.0, 50.0}) {
            CAPTURE(name);
            CAPTURE(T);
            CHECK(spectral_stability_check(discretize_backward_euler(lm, T)).stable);
        }
    }
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const PowerNetwork net = testing::random_network(5, seed);
        const LinearModel lm = linearize(net, Eigen::VectorXd::Constant(5, 0.5));
        CHECK(spectral_stability_check(discretize_backward_euler(lm, 0.2)).stable);
    }
    const CaseData two = testing::load_fixture("two_bus.json");
    const LinearModel lm2 = linearize(two.network, two.scenario.controller.tau);
    const SpectralCheck fe = spectral_stability_check(discretize_forward_euler(lm2, 10.0));
    CHECK(fe.radius > 1.0);
    CHECK_FALSE(fe.stable);

    const CaseData four = testing::load_fixture("four_bus.json");
    CHECK_THROWS_AS(discretize_forward_euler(linearize(four.network, four.scenario.controller.tau), 0.2),
                    SingularG);
}

TEST_CASE("forward and backward Euler agree to second order") {
    const CaseData two = testing::load_fixture("two_bus.json");
    const LinearModel lm = linearize(two.network, two.scenario.controller.tau);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(lm.state_dim());
    const Eigen::VectorXd p = Eigen::Vector2d(1.0, -1.0);
    auto step = [&](const DiscreteModel& dm) -> Eigen::VectorXd {
        const Eigen::VectorXd rhs = dense(dm.A) * x0 + dense(dm.B1) * p;
        return dense(dm.F).partialPivLu().solve(rhs);
    };
    auto gap = [&](double T) {
        return (step(discretize_backward_euler(lm, T)) - step(discretize_forward_euler(lm, T))).norm();
    };
    CHECK(gap(0.01) / gap(0.005) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("MPC program structure") {
    const CaseData four = testing::load_fixture("four_bus.json");
    const PowerNetwork& net = four.network;
    const ControllerConfig& cfg = four.scenario.controller;
    const int N = cfg.horizon_steps();
    const DiscreteModel dm = discretize_backward_euler(linearize(net, cfg.tau), cfg.step, N);
    const SystemState eq = equilibrium_state(net, compute_equilibrium(net));
    const std::vector<Eigen::VectorXd> fc(N, net.injection);
    const QpInstance qp = assemble_mpc_qp(dm, net, cfg, eq, fc);
    const MpcLayout L(net, N);
    CHECK(qp.dim() == L.dim());
    CHECK(qp.n_ineq() == 2 * static_cast<int>(net.safety.size()) * N + 2 * static_cast<int>(net.controlled.size()));

    // alpha_BL = 0 pins u to zero through the sensitivity rows.
    const QpSolution sol = solve_qp_reference(qp);
    CHECK(mpc_control(L, sol.y).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK(locality_audit(qp).max_row_radius <= 1);

    const std::vector<Eigen::VectorXd> short_fc(N - 1, net.injection);
    CHECK_THROWS_AS(assemble_mpc_qp(dm, net, cfg, eq, short_fc), DimensionMismatch);
}

TEST_CASE("MPC dimensions on the 39-bus topology") {
    const CaseData c = testing::load_fixture("ieee39_topology.json");
    const ControllerConfig& cfg = c.scenario.controller;
    CHECK(cfg.horizon_steps() == 50);
    const QpInstance qp = scenario_program(c.network, c.scenario);
    CHECK(qp.n_ineq() == 414);
}

TEST_CASE("forecast indexing") {
    const CaseData four = testing::load_fixture("four_bus.json");
    const DisturbanceProfile& d = four.scenario.disturbance;
    const auto perfect = make_forecast(four.network, d, ForecastMode::Perfect, 10.0, 0.2, 3);
    REQUIRE(perfect.size() == 3);
    CHECK(perfect[0] == injection_at(four.network, d, 10.0));
    CHECK(perfect[2] == injection_at(four.network, d, 10.4));
    const auto hold = make_forecast(four.network, d, ForecastMode::HoldCurrent, 10.0, 0.2, 3);
    CHECK(hold[2] == injection_at(four.network, d, 10.0));
}

TEST_CASE("locality audit") {
    const CaseData four = testing::load_fixture("four_bus.json");
    const PowerNetwork& net = four.network;
    const ControllerConfig& cfg = four.scenario.controller;
    const DiscreteModel dm = discretize_backward_euler(linearize(net, cfg.tau), cfg.step, 5);
    const SystemState eq = equilibrium_state(net, compute_equilibrium(net));
    const std::vector<Eigen::VectorXd> fc(5, net.injection);
    QpInstance qp = assemble_mpc_qp(dm, net, cfg, eq, fc);
    const LocalityReport ok = locality_audit(qp);
    CHECK(ok.max_row_radius == 1);
    CHECK(ok.max_hessian_distance <= 2);

    for (std::uint64_t seed = 1; seed <= 5; ++seed) CHECK_NOTHROW(locality_audit(testing::random_mpc_case(seed).qp));

    // Row owned by bus 1 touching a variable of bus 3 (not adjacent on the ring 1-2-3-4).
    const MpcLayout L(net, 5);
    QpInstance bad = qp;
    int row = -1;
    for (int r = 0; r < bad.n_ineq(); ++r)
        if (bad.ineq_owner[r] == 0) row = r;
    REQUIRE(row >= 0);
    std::vector<Triplet> trips;
    for (int k = 0; k < bad.R1.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(bad.R1, k); it; ++it)
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    trips.emplace_back(row, L.omega(2, 2), 1.0);
    bad.R1.setFromTriplets(trips.begin(), trips.end());
    try {
        locality_audit(bad);
        FAIL("corrupted row accepted");
    } catch (const LocalityViolation& e) {
        CHECK(e.row() == row);
    }
}

TEST_CASE("impulse-invariant discretization is not local") {
    PowerNetwork net = hand_two_bus();
    const ControllerConfig cfg = ControllerConfig::defaults(net);
    const LinearModel lm = linearize(net, cfg.tau);
    const double T = 0.2;
    const Eigen::MatrixXd Ginv = dense(lm.G).inverse();
    const Eigen::MatrixXd Ad = (Ginv * dense(lm.A) * T).exp();
    DiscreteModel dm = discretize_backward_euler(lm, T, 4);
    dm.F = SparseMatrix(lm.state_dim(), lm.state_dim());
    dm.F.setIdentity();
    dm.A = Ad.sparseView();
    // Dense propagator: every state entry depends on every other one.
    CHECK((Ad.array().abs() > 1e-14).count() == Ad.size());
    const SystemState eq = equilibrium_state(net, compute_equilibrium(net));
    const std::vector<Eigen::VectorXd> fc(4, net.injection);
    const QpInstance qp = assemble_mpc_qp(dm, net, cfg, eq, fc);
    CHECK_THROWS_AS(locality_audit(qp), LocalityViolation);
}

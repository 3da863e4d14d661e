#include "../support/fixtures.hpp"

#include "swingsafe/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

using namespace swingsafe;

namespace {

PowerNetwork two_bus(double b, double p) {
    PowerNetwork net;
    net.labels = {1, 2};
    net.lines = {{0, 1, b}};
    net.inertia = Eigen::Vector2d(1.0, 1.0);
    net.damping = Eigen::Vector2d(1.0, 1.0);
    net.injection = Eigen::Vector2d(p, -p);
    net.controlled = {0, 1};
    net.safety = {0};
    return net;
}

PowerNetwork path3(double b1, double b2) {
    PowerNetwork net;
    net.labels = {1, 2, 3};
    net.lines = {{0, 1, b1}, {1, 2, b2}};
    net.inertia = Eigen::Vector3d(1.0, 1.0, 1.0);
    net.damping = Eigen::Vector3d(1.0, 1.0, 1.0);
    net.injection = Eigen::Vector3d::Zero();
    net.controlled = {0};
    net.safety = {0};
    return net;
}

std::string case_text(const std::string& buses, const std::string& edges, const std::string& extra = "") {
    return R"({"version": 1, "name": "t", )" + extra + R"("buses": [)" + buses + R"(], "edges": [)" + edges +
           R"(], "sets": {"controlled": [1], "safety": [1]}})";
}

} // namespace

TEST_CASE("incidence matrix") {
    CHECK(incidence_matrix(two_bus(1.0, 0.0)) == Eigen::RowVector2d(1.0, -1.0));
    Eigen::Matrix<double, 2, 3> d;
    d << 1, -1, 0, 0, 1, -1;
    CHECK(incidence_matrix(path3(1.0, 1.0)) == d);
    const PowerNetwork r = testing::random_network(6, 3);
    CHECK((incidence_matrix(r) * Eigen::VectorXd::Ones(6)).norm() == 0.0);
    CHECK(Eigen::MatrixXd(incidence_sparse(r)) == incidence_matrix(r));
}

TEST_CASE("weighted Laplacian") {
    CHECK(weighted_laplacian(two_bus(1.0, 0.0)) == Eigen::Matrix2d{{1, -1}, {-1, 1}});
    CHECK(weighted_laplacian(path3(2.0, 3.0)) == Eigen::Matrix3d{{2, -2, 0}, {-2, 5, -3}, {0, -3, 3}});
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const PowerNetwork r = testing::random_network(5, seed);
        const Eigen::MatrixXd l = weighted_laplacian(r);
        CHECK((l - l.transpose()).norm() == 0.0);
        CHECK((l * Eigen::VectorXd::Ones(5)).norm() < 1e-12);
    }
}

TEST_CASE("pseudoinverse satisfies the Moore-Penrose identities") {
    const Eigen::MatrixXd l = weighted_laplacian(testing::random_network(5, 11));
    const Eigen::MatrixXd p = symmetric_pinv(l);
    CHECK((l * p * l - l).norm() < 1e-10);
    CHECK((p * l * p - p).norm() < 1e-10);
}

TEST_CASE("equilibrium condition") {
    CHECK(check_equilibrium_condition(two_bus(1.0, 0.0)).value == 0.0);
    CHECK(check_equilibrium_condition(two_bus(1.0, 0.0)).holds);
    const EquilibriumCheck a = check_equilibrium_condition(two_bus(1.0, 0.5));
    CHECK(a.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(a.holds);
    const EquilibriumCheck b = check_equilibrium_condition(two_bus(1.0, 1.2));
    CHECK(b.value == doctest::Approx(1.2).epsilon(1e-12));
    CHECK_FALSE(b.holds);
}

TEST_CASE("equilibrium angles") {
    CHECK(compute_equilibrium(two_bus(1.0, 0.0)).norm() == 0.0);
    CHECK(compute_equilibrium(two_bus(1.0, 0.5))[0] == doctest::Approx(std::asin(0.5)).epsilon(1e-12));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const PowerNetwork r = testing::random_network(2 + static_cast<int>(seed % 5), seed);
        const Eigen::VectorXd lam = compute_equilibrium(r);
        const Eigen::MatrixXd d = incidence_matrix(r);
        const Eigen::VectorXd flow = d.transpose() * (r.susceptances().array() * lam.array().sin()).matrix();
        CHECK((flow - r.injection).norm() <= 1e-10);
        CHECK(range_residual(d, lam) <= 1e-10);
    }
}

TEST_CASE("network validation") {
    PowerNetwork bad = two_bus(1.0, 0.5);
    bad.injection[0] = 0.7;
    CHECK_THROWS_AS(validate(bad), UnbalancedInjection);
    PowerNetwork island = path3(1.0, 1.0);
    island.lines.pop_back();
    CHECK_THROWS_AS(validate(island), DisconnectedGraph);
    PowerNetwork neg = two_bus(1.0, 0.0);
    neg.damping[1] = 0.0;
    CHECK_THROWS_AS(validate(neg), InvalidNetwork);
}

TEST_CASE("case files") {
    const CaseData four = testing::load_fixture("four_bus.json");
    CHECK(four.network.n_buses() == 4);
    CHECK(four.network.n_lines() == 4);
    CHECK(four.network.inertia[2] == 0.0);
    CHECK(check_equilibrium_condition(four.network).holds);
    CHECK(testing::load_fixture("two_bus.json").network.n_buses() == 2);

    const std::string b2 = R"({"id": 1, "inertia": 1, "damping": 1, "injection": 0.5},
                              {"id": 2, "inertia": 1, "damping": 1, "injection": -0.4})";
    const std::string e12 = R"({"from": 1, "to": 2, "susceptance": 1})";
    CHECK_THROWS_AS(parse_case(case_text(b2, e12)), UnbalancedInjection);
    const CaseData fixed = parse_case(case_text(b2, e12, R"("rebalance": true, )"));
    CHECK(fixed.network.injection.sum() == doctest::Approx(0.0).scale(1.0));

    const std::string b3 = R"({"id": 1, "inertia": 1, "damping": 1, "injection": 0},
                              {"id": 2, "inertia": 1, "damping": 1, "injection": 0},
                              {"id": 3, "inertia": 1, "damping": 1, "injection": 0})";
    CHECK_THROWS_AS(parse_case(case_text(b3, e12)), DisconnectedGraph);
    CHECK_THROWS_AS(parse_case("{not json"), SchemaError);
    CHECK_THROWS_AS(parse_case(R"({"version": 1})"), SchemaError);
}

TEST_CASE("disturbance profile") {
    const DisturbanceProfile d = DisturbanceProfile::standard(0.2, {0});
    CHECK(d.value(0.0) == doctest::Approx(0.0));
    CHECK(d.value(25.0) == doctest::Approx(0.2));
    CHECK(d.value(75.0) == doctest::Approx(0.2));
    CHECK(d.value(137.5) == doctest::Approx(0.2 * std::sin(0.75 * std::numbers::pi)));
    CHECK(d.value(137.5) == doctest::Approx(0.1414).epsilon(1e-3));
    CHECK(d.value(160.0) == 0.0);
    CHECK(DisturbanceProfile::none().value(10.0) == 0.0);

    const PowerNetwork net = two_bus(1.0, 0.5);
    const Eigen::VectorXd p = injection_at(net, d, 75.0);
    CHECK(p[0] == doctest::Approx(0.6));
    CHECK(p[1] == -0.5);
}

TEST_CASE("controller configuration") {
    const PowerNetwork net = two_bus(1.0, 0.0);
    ControllerConfig c = ControllerConfig::defaults(net);
    CHECK(c.horizon_steps() == 50);
    CHECK(c.cost_weight[0] == 4.0);
    CHECK(c.cost_weight[1] == 1.0);
    validate(c, net);
    c.omega_min_thr[0] = c.omega_min[0] - 1.0;
    CHECK_THROWS_AS(validate(c, net), ConfigError);
    CHECK(parse_control_mode("top-only") == ControlMode::TopOnly);
    CHECK(parse_backend("saddle-distributed") == SolverBackend::SaddleDistributed);
    CHECK_THROWS_AS(parse_control_mode("fast"), ConfigError);
}

#include "../support/fixtures.hpp"

#include "swingsafe/controller.hpp"
#include "swingsafe/errors.hpp"

#include <doctest.h>

#include <random>

using namespace swingsafe;

TEST_CASE("stability filter") {
    CHECK(stability_filter(0.1, 0.5, 1.9) == doctest::Approx(0.19));
    CHECK(stability_filter(-0.1, 0.5, 1.9) == doctest::Approx(0.19));
    CHECK(stability_filter(0.1, -0.5, 1.9) == doctest::Approx(-0.19));
    CHECK(stability_filter(0.0, 3.0, 1.9) == 0.0);
    CHECK(stability_filter(0.1, 0.05, 1.9) == 0.05);
}

TEST_CASE("low-pass filter") {
    CHECK(lowpass_rhs(true, 0.5 * 0.3, 0.0, 0.3, 0.5) == doctest::Approx(0.0));
    CHECK(lowpass_rhs(true, 0.0, 1.0, 0.0, 0.5) == -1.0);
    CHECK(lowpass_rhs(false, 0.3, 1.0, 0.2, 0.5) == 0.0);

    // With the filtered input the rate obeys the dissipation split.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const double eps = 1.9, tau = 0.5;
    double worst = -1e300;
    for (int k = 0; k < 10000; ++k) {
        const double a = u(rng), w = u(rng), raw = 3.0 * u(rng);
        const double uh = stability_filter(a, raw, eps);
        const double lhs = a * lowpass_rhs(true, a, w, uh, tau);
        const double rhs = -(1.0 / tau - eps) * a * a - a * w;
        worst = std::max(worst, lhs - rhs);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("top-layer law") {
    const CaseData four = testing::load_fixture("four_bus.json");
    const ControllerConfig& cfg = four.scenario.controller;
    const int bus = 0;
    // Closed band between the thresholds.
    CHECK(top_layer_law(cfg, bus, 0.0, 5.0) == 0.0);
    CHECK(top_layer_law(cfg, bus, cfg.omega_max_thr[bus], 5.0) == 0.0);
    CHECK(top_layer_law(cfg, bus, cfg.omega_min_thr[bus], -5.0) == 0.0);
    // On the bound the barrier term vanishes.
    const double wmax = cfg.omega_max[bus];
    CHECK(top_layer_law(cfg, bus, wmax, 0.7) == 0.0);
    CHECK(top_layer_law(cfg, bus, wmax, -0.7) == doctest::Approx(-0.7));
    CHECK(top_layer_law(cfg, bus, cfg.omega_min[bus], -0.7) == 0.0);
    CHECK(top_layer_law(cfg, bus, cfg.omega_min[bus], 0.7) == doctest::Approx(0.7));

    // Just above the upper threshold the barrier is large and positive.
    const double w = cfg.omega_max_thr[bus] + 0.01;
    const double barrier = cfg.gamma_max[bus] * (wmax - w) / (w - cfg.omega_max_thr[bus]);
    CHECK(barrier > 50.0);
    CHECK(top_layer_law(cfg, bus, w, -barrier + 1.0) == 0.0);
    CHECK(top_layer_law(cfg, bus, w, -barrier - 2.0) == doctest::Approx(-2.0));

    // Sign property over a grid.
    bool sign_ok = true;
    for (double om = -2.0; om <= 2.0; om += 0.01)
        for (double v = -5.0; v <= 5.0; v += 0.25) sign_ok = sign_ok && om * top_layer_law(cfg, bus, om, v) <= 0.0;
    CHECK(sign_ok);
}

TEST_CASE("alpha composition") {
    const CaseData four = testing::load_fixture("four_bus.json");
    const PowerNetwork& net = four.network;
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
    CHECK(compose_alpha(net, z, z) == z);
    const Eigen::Vector4d tl(0.1, 0.0, 0.0, 0.0), bl(0.2, 0.3, 0.0, -0.1);
    const Eigen::VectorXd a = compose_alpha(net, tl, bl);
    CHECK(a == Eigen::Vector4d(0.1 + 0.2, 0.3, 0.0, -0.1));
    Eigen::Vector4d bad = bl;
    bad[2] = 0.5; // bus 3 is not controlled
    CHECK_THROWS_AS(compose_alpha(net, tl, bad), PreconditionError);
}

TEST_CASE("MPC component") {
    const CaseData four = testing::load_fixture("four_bus.json");
    const PowerNetwork& net = four.network;
    const ControllerConfig& cfg = four.scenario.controller;
    MpcComponent mpc(net, cfg, MpcSettings{});
    const int N = cfg.horizon_steps();
    const std::vector<Eigen::VectorXd> nominal(N, net.injection);

    const SystemState eq = equilibrium_state(net, compute_equilibrium(net));
    CHECK(mpc.sample(0.0, eq, nominal).lpNorm<Eigen::Infinity>() <= 1e-8);

    // Zero filter state forces zero input even under a disturbance.
    SystemState x = eq;
    x.omega = Eigen::Vector4d(-0.8, -0.7, 0.0, -0.9);
    const auto heavy = make_forecast(net, four.scenario.disturbance, ForecastMode::Perfect, 30.0, cfg.step, N);
    CHECK(mpc.sample(1.0, x, heavy).lpNorm<Eigen::Infinity>() <= 1e-8);

    // Continuity in the sampled state.
    x.alpha_bl = Eigen::Vector4d(0.3, 0.2, 0.0, 0.4);
    const Eigen::VectorXd u0 = mpc.sample(2.0, x, heavy);
    CHECK(u0.norm() > 1e-3);
    for (double h : {1e-3, 1e-4}) {
        SystemState y = x;
        y.omega[0] += h;
        y.alpha_bl[1] += h;
        const Eigen::VectorXd u1 = mpc.sample(3.0, y, heavy);
        CHECK((u1 - u0).norm() <= 50.0 * h);
    }
    for (int i = 0; i < 4; ++i)
        if (!net.is_controlled(i)) CHECK(u0[i] == 0.0);
    CHECK(mpc.history().size() == 5);
}

TEST_CASE("bilayer controller switches on at the start time") {
    const CaseData four = testing::load_fixture("four_bus.json");
    ScenarioConfig sc = four.scenario;
    sc.controller_start = 2.0;
    BilayerController law(four.network, sc);
    const SystemState eq = equilibrium_state(four.network, compute_equilibrium(four.network));
    law.on_step(0.0, eq, sc.disturbance, true);
    CHECK_FALSE(law.active());
    CHECK(law.top_layer(0, -10.0, 0.0) == 0.0);
    law.on_step(2.0, eq, sc.disturbance, true);
    CHECK(law.active());
    CHECK(law.top_layer(0, sc.controller.omega_min[0] - 0.1, 0.0) > 0.0);
    CHECK(law.bottom_layer_enabled());

    sc.mode = ControlMode::TopOnly;
    BilayerController top(four.network, sc);
    CHECK_FALSE(top.bottom_layer_enabled());
}

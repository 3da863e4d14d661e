#include "swingsafe/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

using namespace swingsafe::kernels;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 3.0);
    std::vector<double> v(n);
    for (double& x : v) x = g(rng);
    // Exercise the projection branches.
    for (std::size_t i = 0; i < n; i += 5) v[i] = 0.0;
    return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Odd lengths cover the scalar tail of the vector loops.
const std::size_t kSizes[] = {0, 1, 3, 4, 7, 8, 33, 1001};

} // namespace

TEST_CASE("scalar kernels follow their definitions") {
    const Table& s = table(Isa::Scalar);
    std::vector<double> z{1.0, 2.0}, g{0.5, -1.0};
    s.primal_step(z, g, 2.0);
    CHECK(z == std::vector<double>{0.0, 4.0});

    std::vector<double> eta{0.0, 0.5, 0.0}, r{-3.0, -3.0, 2.0};
    std::vector<double> dir(3);
    s.projected_direction(dir, r, eta);
    CHECK(dir == std::vector<double>{0.0, -3.0, 2.0});
    s.dual_ineq_step(eta, r, 0.1);
    CHECK(eta[0] == 0.0);
    CHECK(eta[1] == doctest::Approx(0.2));
    CHECK(eta[2] == doctest::Approx(0.2));

    std::vector<double> a{1.0, -4.0, 2.0}, b{2.0, 1.0, -1.0};
    CHECK(s.dot(a, b) == -4.0);
    CHECK(s.max_abs(a) == 4.0);
    CHECK(s.positive_part_sq(a) == 5.0);
}

TEST_CASE("AVX2 kernels match the scalar reference") {
    if (!isa_available(Isa::Avx2)) {
        MESSAGE("AVX2 not available on this machine; equivalence not exercised");
        return;
    }
    const Table& s = table(Isa::Scalar);
    const Table& v = table(Isa::Avx2);
    for (std::size_t n : kSizes) {
        CAPTURE(n);
        const auto x = noise(n, 1 + n), y = noise(n, 2 + n), k1 = noise(n, 3 + n), k2 = noise(n, 4 + n),
                   k3 = noise(n, 5 + n), k4 = noise(n, 6 + n);

        auto z1 = x, z2 = x;
        s.primal_step(z1, y, 0.37);
        v.primal_step(z2, y, 0.37);
        CHECK(same_bits(z1, z2));

        auto e1 = x, e2 = x;
        for (double& e : e1) e = std::abs(e) * (e > 1.0);
        e2 = e1;
        s.dual_ineq_step(e1, y, 0.21);
        v.dual_ineq_step(e2, y, 0.21);
        CHECK(same_bits(e1, e2));

        auto m1 = x, m2 = x;
        s.dual_eq_step(m1, y, -0.8);
        v.dual_eq_step(m2, y, -0.8);
        CHECK(same_bits(m1, m2));

        std::vector<double> d1(n), d2(n), eta = k1;
        for (double& e : eta) e = std::max(e, 0.0);
        s.projected_direction(d1, y, eta);
        v.projected_direction(d2, y, eta);
        CHECK(same_bits(d1, d2));

        auto a1 = x, a2 = x;
        s.axpy(a1, 1.3, y);
        v.axpy(a2, 1.3, y);
        CHECK(same_bits(a1, a2));

        std::vector<double> o1(n), o2(n);
        s.add_scaled(o1, x, 0.5, y);
        v.add_scaled(o2, x, 0.5, y);
        CHECK(same_bits(o1, o2));

        s.rk4_combine(o1, x, 1e-3 / 6.0, k1, k2, k3, k4);
        v.rk4_combine(o2, x, 1e-3 / 6.0, k1, k2, k3, k4);
        CHECK(same_bits(o1, o2));

        CHECK(s.max_abs(x) == v.max_abs(x));
        // Reductions sum lanes in a different order.
        const double scale = 1.0 + n * 9.0;
        CHECK(std::abs(s.dot(x, y) - v.dot(x, y)) <= 1e-13 * scale * 9.0);
        CHECK(std::abs(s.positive_part_sq(x) - v.positive_part_sq(x)) <= 1e-13 * scale * 9.0);
    }
}

TEST_CASE("active ISA can be switched") {
    const Isa before = active_isa();
    set_active_isa(Isa::Scalar);
    CHECK(active_isa() == Isa::Scalar);
    std::vector<double> z{1.0}, g{1.0};
    primal_step(z, g, 1.0);
    CHECK(z[0] == 0.0);
    set_active_isa(before);
    CHECK(isa_name(Isa::Scalar) == "scalar");
}

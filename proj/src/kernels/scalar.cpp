#include "tables.hpp"

#include <algorithm>
#include <cmath>

namespace swingsafe::kernels::scalar {
namespace {

void primal_step(std::span<double> z, std::span<const double> g, double coef) noexcept {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = z[i] - coef * g[i];
}

void dual_ineq_step(std::span<double> eta, std::span<const double> r, double coef) noexcept {
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double d = eta[i] > 0.0 ? r[i] : std::max(r[i], 0.0);
        eta[i] = std::max(eta[i] + coef * d, 0.0);
    }
}

void dual_eq_step(std::span<double> mu, std::span<const double> r, double coef) noexcept {
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = mu[i] + coef * r[i];
}

void projected_direction(std::span<double> out, std::span<const double> r,
                         std::span<const double> eta) noexcept {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = eta[i] > 0.0 ? r[i] : std::max(r[i], 0.0);
}

void axpy(std::span<double> y, double a, std::span<const double> x) noexcept {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = y[i] + a * x[i];
}

void add_scaled(std::span<double> out, std::span<const double> x, double a,
                std::span<const double> y) noexcept {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + a * y[i];
}

void rk4_combine(std::span<double> out, std::span<const double> x, double c,
                 std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4) noexcept {
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double s = ((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i];
        out[i] = x[i] + c * s;
    }
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_abs(std::span<const double> a) noexcept {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

double positive_part_sq(std::span<const double> a) noexcept {
    double s = 0.0;
    for (double v : a) {
        const double p = std::max(v, 0.0);
        s += p * p;
    }
    return s;
}

} // namespace

const Table kTable{
    primal_step, dual_ineq_step, dual_eq_step, projected_direction, axpy,
    add_scaled,  rk4_combine,    dot,          max_abs,             positive_part_sq,
};

} // namespace swingsafe::kernels::scalar

#pragma once

// Data-parallel inner loops of the saddle-point solver and the integrator.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant picked at runtime. Elementwise kernels are required to agree with
// the scalar reference bit for bit (no FMA, same operation order per lane).
// Reductions may differ in the last few ulps because lanes are summed in a
// different order.

#include <cstddef>
#include <span>
#include <string_view>

namespace swingsafe::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// True when the running CPU and the build both support `isa`.
bool isa_available(Isa isa) noexcept;

/// ISA used by the free functions below. Defaults to the best available one;
/// the SWINGSAFE_ISA environment variable ("scalar" or "avx2") overrides.
Isa active_isa() noexcept;
void set_active_isa(Isa isa);

struct Table {
    // z[i] = z[i] - coef * g[i]
    void (*primal_step)(std::span<double> z, std::span<const double> g, double coef) noexcept;
    // d = eta > 0 ? r : max(r, 0);  eta = max(eta + coef * d, 0)
    void (*dual_ineq_step)(std::span<double> eta, std::span<const double> r, double coef) noexcept;
    // mu[i] = mu[i] + coef * r[i]
    void (*dual_eq_step)(std::span<double> mu, std::span<const double> r, double coef) noexcept;
    // out[i] = [r]^+_eta, the projected dual direction (unscaled)
    void (*projected_direction)(std::span<double> out, std::span<const double> r,
                                std::span<const double> eta) noexcept;
    // y[i] = y[i] + a * x[i]
    void (*axpy)(std::span<double> y, double a, std::span<const double> x) noexcept;
    // out[i] = x[i] + a * y[i]
    void (*add_scaled)(std::span<double> out, std::span<const double> x, double a,
                       std::span<const double> y) noexcept;
    // out = x + c * (k1 + 2 k2 + 2 k3 + k4)
    void (*rk4_combine)(std::span<double> out, std::span<const double> x, double c,
                        std::span<const double> k1, std::span<const double> k2,
                        std::span<const double> k3, std::span<const double> k4) noexcept;
    double (*dot)(std::span<const double> a, std::span<const double> b) noexcept;
    double (*max_abs)(std::span<const double> a) noexcept;
    // sum of max(a[i], 0)^2
    double (*positive_part_sq)(std::span<const double> a) noexcept;
};

const Table& table(Isa isa);
inline const Table& table() { return table(active_isa()); }

inline void primal_step(std::span<double> z, std::span<const double> g, double coef) noexcept {
    table().primal_step(z, g, coef);
}
inline void dual_ineq_step(std::span<double> eta, std::span<const double> r, double coef) noexcept {
    table().dual_ineq_step(eta, r, coef);
}
inline void dual_eq_step(std::span<double> mu, std::span<const double> r, double coef) noexcept {
    table().dual_eq_step(mu, r, coef);
}
inline void projected_direction(std::span<double> out, std::span<const double> r,
                                std::span<const double> eta) noexcept {
    table().projected_direction(out, r, eta);
}
inline void axpy(std::span<double> y, double a, std::span<const double> x) noexcept {
    table().axpy(y, a, x);
}
inline void add_scaled(std::span<double> out, std::span<const double> x, double a,
                       std::span<const double> y) noexcept {
    table().add_scaled(out, x, a, y);
}
inline void rk4_combine(std::span<double> out, std::span<const double> x, double c,
                        std::span<const double> k1, std::span<const double> k2,
                        std::span<const double> k3, std::span<const double> k4) noexcept {
    table().rk4_combine(out, x, c, k1, k2, k3, k4);
}
inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
    return table().dot(a, b);
}
inline double max_abs(std::span<const double> a) noexcept { return table().max_abs(a); }
inline double positive_part_sq(std::span<const double> a) noexcept {
    return table().positive_part_sq(a);
}

} // namespace swingsafe::kernels

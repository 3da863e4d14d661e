#pragma once

#include "swingsafe/kernels.hpp"

#include <vector>

namespace swingsafe {

template <class Rhs>
std::vector<double> rk4_step(const Rhs& rhs, double t, const std::vector<double>& y, double dt) {
    const std::size_t n = y.size();
    std::vector<double> tmp(n), out(n);
    const std::vector<double> k1 = rhs(t, y);
    kernels::add_scaled(tmp, y, 0.5 * dt, k1);
    const std::vector<double> k2 = rhs(t + 0.5 * dt, tmp);
    kernels::add_scaled(tmp, y, 0.5 * dt, k2);
    const std::vector<double> k3 = rhs(t + 0.5 * dt, tmp);
    kernels::add_scaled(tmp, y, dt, k3);
    const std::vector<double> k4 = rhs(t + dt, tmp);
    kernels::rk4_combine(out, y, dt / 6.0, k1, k2, k3, k4);
    return out;
}

} // namespace swingsafe

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace swingsafe {

/// Logged closed-loop run. Per-bus quantities are stored row by row with n
/// entries per row; frequencies are in rad/s.
struct Trajectory {
    int n = 0;
    int m = 0;
    std::vector<int> controlled, safety;
    double controller_start = 0.0;

    std::vector<double> t;
    std::vector<double> lambda;   // m per row
    std::vector<double> omega;
    std::vector<double> alpha_bl;
    std::vector<double> alpha_tl;
    std::vector<double> alpha;
    std::vector<double> u_hat;    // stability filter output
    std::vector<double> u_mpc;    // MPC output as applied before the filter
    std::vector<double> p;
    std::vector<double> V, Vbar;
    std::vector<double> vbar_rate;         // gradient of Vbar along the vector field
    std::vector<double> dissipation_bound; // -w'Ew - sum (1/tau - eps) alpha_BL^2

    int rows() const { return static_cast<int>(t.size()); }
    double at(const std::vector<double>& v, int row, int bus) const {
        return v[static_cast<std::size_t>(row) * n + bus];
    }
    Eigen::Map<const Eigen::VectorXd> row(const std::vector<double>& v, int r) const {
        return {v.data() + static_cast<std::size_t>(r) * n, n};
    }
};

} // namespace swingsafe

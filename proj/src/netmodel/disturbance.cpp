#include "swingsafe/disturbance.hpp"

#include <cmath>
#include <numbers>

namespace swingsafe {

double DisturbanceProfile::value(double t) const {
    if (t < 0.0) return 0.0;
    for (const auto& s : segments) {
        if (t <= s.end) return s.offset + s.amplitude * std::sin(s.rate * (t - s.phase_time));
    }
    return 0.0;
}

DisturbanceProfile DisturbanceProfile::standard(double amplitude, std::vector<int> buses) {
    const double rate = std::numbers::pi / 50.0;
    DisturbanceProfile d;
    d.segments = {
        {25.0, 0.0, amplitude, rate, 0.0},
        {125.0, amplitude, 0.0, 0.0, 0.0},
        {150.0, 0.0, amplitude, rate, 100.0},
    };
    d.buses = std::move(buses);
    return d;
}

Eigen::VectorXd injection_at(const PowerNetwork& net, const DisturbanceProfile& dist, double t) {
    Eigen::VectorXd p = net.injection;
    if (dist.buses.empty() || dist.segments.empty()) return p;
    const double delta = dist.value(t);
    for (int i : dist.buses) p[i] = (1.0 + delta) * net.injection[i];
    return p;
}

} // namespace swingsafe

#pragma once

#include "swingsafe/network.hpp"

#include <vector>

namespace swingsafe {

/// One piece of delta(t): offset + amplitude * sin(rate * (t - phase_time)),
/// active on (previous end, end]. The first piece also covers t = 0.
struct DisturbanceSegment {
    double end = 0.0;
    double offset = 0.0;
    double amplitude = 0.0;
    double rate = 0.0;
    double phase_time = 0.0;
};

enum class ForecastMode { Perfect, HoldCurrent };

/// Multiplicative load disturbance p_i(t) = (1 + delta(t)) p_i(0) on `buses`.
struct DisturbanceProfile {
    std::vector<DisturbanceSegment> segments; // ordered by `end`
    std::vector<int> buses;                   // sorted, 0-based

    double value(double t) const;
    double end_time() const { return segments.empty() ? 0.0 : segments.back().end; }

    /// Ramp-up / plateau / ramp-down shape peaking at `amplitude`, zero after 150 s.
    static DisturbanceProfile standard(double amplitude, std::vector<int> buses);
    static DisturbanceProfile none() { return {}; }
};

/// Injection vector at time t.
Eigen::VectorXd injection_at(const PowerNetwork& net, const DisturbanceProfile& dist, double t);

} // namespace swingsafe

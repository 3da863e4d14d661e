#pragma once

#include "swingsafe/qp.hpp"

namespace swingsafe {

struct LocalityReport {
    long rows_checked = 0;
    long hessian_couplings = 0;
    int max_row_radius = 0;     // largest distance from a row's agent to one of its variables
    int max_hessian_distance = 0;
};

/// Every constraint row may only touch variables within one hop of the
/// agent it belongs to, and every Hessian coupling must join variables whose
/// owners are at most two hops apart. Throws LocalityViolation.
LocalityReport locality_audit(const QpInstance& qp);

} // namespace swingsafe

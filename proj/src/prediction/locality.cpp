#include "swingsafe/locality.hpp"

#include "swingsafe/errors.hpp"

#include <algorithm>

namespace swingsafe {
namespace {

void audit_rows(const SparseMatrix& r, const std::vector<int>& row_owner, const QpInstance& qp,
                const AgentGraph& g, const char* name, long row_base, LocalityReport& rep) {
    for (int row = 0; row < r.rows(); ++row) {
        const int centre = row_owner[row];
        for (SparseMatrix::InnerIterator it(r, row); it; ++it) {
            const int d = g.distance(centre, qp.owner[it.col()]);
            rep.max_row_radius = std::max(rep.max_row_radius, d);
            if (d > 1)
                throw LocalityViolation(std::string(name) + " row " + std::to_string(row) +
                                            " reaches variable " + std::to_string(it.col()) +
                                            " at distance " + std::to_string(d),
                                        row_base + row);
        }
        ++rep.rows_checked;
    }
}

} // namespace

LocalityReport locality_audit(const QpInstance& qp) {
    check_dimensions(qp);
    const AgentGraph g(qp);
    LocalityReport rep;
    audit_rows(qp.R1, qp.ineq_owner, qp, g, "inequality", 0, rep);
    audit_rows(qp.R2, qp.eq_owner, qp, g, "equality", qp.R1.rows(), rep);
    for (int row = 0; row < qp.H.rows(); ++row) {
        for (SparseMatrix::InnerIterator it(qp.H, row); it; ++it) {
            const int d = g.distance(qp.owner[row], qp.owner[it.col()]);
            rep.max_hessian_distance = std::max(rep.max_hessian_distance, d);
            if (d > 2)
                throw LocalityViolation("Hessian couples variables " + std::to_string(row) + " and " +
                                            std::to_string(it.col()) + " at distance " +
                                            std::to_string(d),
                                        -1);
            ++rep.hessian_couplings;
        }
    }
    return rep;
}

} // namespace swingsafe

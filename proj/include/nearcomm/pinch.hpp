#pragma once

#include <vector>

#include "nearcomm/hermitian.hpp"

namespace nearcomm {

// Zero every entry of A that straddles two different blocks. blocks must
// partition {0,...,dim-1}; overlapping or incomplete partitions are rejected.
// Idempotent, trace-preserving, and a contraction in operator and trace norm.
Matrix pinch(const Matrix& a, const std::vector<std::vector<int>>& blocks);

struct RoundedProjection {
    OrthoProjection projection;
    double distance;         // ||P_hat - P||_op, equals max_i min(p_i, 1-p_i)
    double idempotency_gap;  // ||P^2 - P||_op, equals max_i |p_i^2 - p_i|
};

// Spectral rounding of an almost-projection: P_hat projects onto the
// eigenvectors of P with eigenvalue above 1/2 (exact ties round down).
// Requires ||P^2 - P||_op < delta with delta < 1/2. The construction
// guarantees distance <= 2 * idempotency_gap; the factor 2 is attained as
// eigenvalues approach 1/2.
RoundedProjection round_to_projection(const HermitianOperator& p, double delta);

}  // namespace nearcomm

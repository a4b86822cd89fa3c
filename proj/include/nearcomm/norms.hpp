#pragma once

#include "nearcomm/complex_matrix.hpp"

namespace nearcomm {

// Largest singular value, computed from the Hermitian matrix A†A.
double operator_norm(const Matrix& a);

// Sum of singular values.
double trace_norm(const Matrix& a);

// AB - BA.
Matrix commutator(const Matrix& a, const Matrix& b);

}  // namespace nearcomm

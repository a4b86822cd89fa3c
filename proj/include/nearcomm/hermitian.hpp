#pragma once

#include "nearcomm/complex_matrix.hpp"

namespace nearcomm {

// Hermitian matrix. Construction symmetrizes the input and rejects matrices
// whose anti-Hermitian part exceeds the tolerance (default herm_tol(dim)).
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix m, double tol = -1.0);

    const Matrix& matrix() const { return m_; }
    int dim() const { return m_.dim(); }

    static HermitianOperator diagonal(const std::vector<double>& values);

private:
    Matrix m_;
};

// Orthogonal projection. Construction checks idempotency (||P^2 - P||_F
// within proj_tol) and that the trace is integral; rank = round(trace).
class OrthoProjection {
public:
    explicit OrthoProjection(HermitianOperator p, double tol = -1.0);

    static OrthoProjection zero(int dim);
    static OrthoProjection full(int dim);
    // Projection onto the span of the given orthonormal columns of basis.
    static OrthoProjection from_basis_columns(const Matrix& basis, const std::vector<int>& cols);

    const Matrix& matrix() const { return op_.matrix(); }
    const HermitianOperator& op() const { return op_; }
    int dim() const { return op_.dim(); }
    int rank() const { return rank_; }

private:
    HermitianOperator op_;
    int rank_;
};

}  // namespace nearcomm

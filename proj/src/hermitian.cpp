#include "nearcomm/hermitian.hpp"

#include <cmath>
#include <string>

namespace nearcomm {

HermitianOperator::HermitianOperator(Matrix m, double tol) : m_(m.dim()) {
    if (tol < 0.0) tol = herm_tol(m.dim());
    if (!m.all_finite())
        throw PreconditionViolation("HermitianOperator: non-finite entries");
    const double dev = (m - m.adjoint()).max_abs();
    if (dev > 2.0 * tol)
        throw PreconditionViolation("HermitianOperator: anti-Hermitian part " +
                                    std::to_string(dev) + " exceeds tolerance " +
                                    std::to_string(2.0 * tol));
    m_ = symmetrize(m);
}

HermitianOperator HermitianOperator::diagonal(const std::vector<double>& values) {
    Matrix m(static_cast<int>(values.size()));
    for (size_t i = 0; i < values.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = values[i];
    return HermitianOperator(std::move(m));
}

OrthoProjection::OrthoProjection(HermitianOperator p, double tol) : op_(std::move(p)), rank_(0) {
    const int n = op_.dim();
    if (tol < 0.0) tol = proj_tol(n);
    const Matrix& m = op_.matrix();
    const double idem = (m * m - m).frobenius_norm();
    if (idem > tol)
        throw PreconditionViolation("OrthoProjection: ||P^2 - P||_F = " + std::to_string(idem) +
                                    " exceeds tolerance " + std::to_string(tol));
    const double tr = m.trace().real();
    rank_ = static_cast<int>(std::lround(tr));
    if (std::abs(tr - rank_) > tol || rank_ < 0 || rank_ > n)
        throw PreconditionViolation("OrthoProjection: trace " + std::to_string(tr) +
                                    " is not a valid rank");
}

OrthoProjection OrthoProjection::zero(int dim) {
    return OrthoProjection(HermitianOperator(Matrix(dim)));
}

OrthoProjection OrthoProjection::full(int dim) {
    return OrthoProjection(HermitianOperator(Matrix::identity(dim)));
}

OrthoProjection OrthoProjection::from_basis_columns(const Matrix& basis,
                                                    const std::vector<int>& cols) {
    const int n = basis.dim();
    Matrix p(n);
    for (int c : cols) {
        if (c < 0 || c >= n) throw PreconditionViolation("from_basis_columns: column out of range");
        for (int i = 0; i < n; ++i) {
            const cplx bi = basis(i, c);
            if (bi == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < n; ++j) p(i, j) += bi * std::conj(basis(j, c));
        }
    }
    return OrthoProjection(HermitianOperator(std::move(p)));
}

}  // namespace nearcomm

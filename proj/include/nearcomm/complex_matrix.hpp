#pragma once

#include <complex>
#include <vector>

#include "nearcomm/errors.hpp"

namespace nearcomm {

using cplx = std::complex<double>;

// Dense square complex matrix, row-major.
class Matrix {
public:
    explicit Matrix(int dim);
    static Matrix identity(int dim);

    int dim() const { return dim_; }

    cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }

    cplx* row(int i) { return a_.data() + static_cast<size_t>(i) * dim_; }
    const cplx* row(int i) const { return a_.data() + static_cast<size_t>(i) * dim_; }

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(cplx s);

    Matrix adjoint() const;
    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;            // largest |entry|
    double max_abs_diag_free() const;  // largest |entry| off the diagonal
    bool all_finite() const;

private:
    int dim_;
    std::vector<cplx> a_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(cplx s, Matrix m);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);

// (A + A†)/2
Matrix symmetrize(const Matrix& a);

void check_same_dim(const Matrix& a, const Matrix& b, const char* what);

}  // namespace nearcomm

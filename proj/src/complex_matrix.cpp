#include "nearcomm/complex_matrix.hpp"

#include <atomic>
#include <cmath>
#include <string>

namespace nearcomm {

namespace {
std::atomic<double> g_tol_scale{1.0};
}

double tolerance_scale() { return g_tol_scale.load(); }
void set_tolerance_scale(double s) {
    if (!(s > 0.0)) throw PreconditionViolation("tolerance scale must be positive");
    g_tol_scale.store(s);
}

double herm_tol(int dim) { return 1e-10 * dim * tolerance_scale(); }
double proj_tol(int dim) { return 1e-10 * dim * tolerance_scale(); }
double degeneracy_tol(double op_norm) { return 1e-9 * op_norm * tolerance_scale(); }

Matrix::Matrix(int dim) : dim_(dim) {
    if (dim < 1) throw PreconditionViolation("matrix dimension must be >= 1");
    a_.assign(static_cast<size_t>(dim) * dim, cplx(0.0, 0.0));
}

Matrix Matrix::identity(int dim) {
    Matrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    check_same_dim(*this, rhs, "operator+=");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += rhs.a_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    check_same_dim(*this, rhs, "operator-=");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= rhs.a_[k];
    return *this;
}

Matrix& Matrix::operator*=(cplx s) {
    for (auto& v : a_) v *= s;
    return *this;
}

Matrix Matrix::adjoint() const {
    Matrix r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

cplx Matrix::trace() const {
    cplx t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
}

double Matrix::max_abs_diag_free() const {
    double m = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            if (i != j) m = std::max(m, std::abs((*this)(i, j)));
    return m;
}

bool Matrix::all_finite() const {
    for (const auto& v : a_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(cplx s, Matrix m) { return m *= s; }

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    check_same_dim(lhs, rhs, "operator*");
    const int n = lhs.dim();
    Matrix r(n);
    for (int i = 0; i < n; ++i) {
        const cplx* li = lhs.row(i);
        cplx* ri = r.row(i);
        for (int k = 0; k < n; ++k) {
            const cplx v = li[k];
            if (v == cplx(0.0, 0.0)) continue;
            const cplx* rk = rhs.row(k);
            for (int j = 0; j < n; ++j) ri[j] += v * rk[j];
        }
    }
    return r;
}

Matrix symmetrize(const Matrix& a) {
    const int n = a.dim();
    Matrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    return r;
}

void check_same_dim(const Matrix& a, const Matrix& b, const char* what) {
    if (a.dim() != b.dim())
        throw DimensionMismatch(std::string(what) + ": dimensions " + std::to_string(a.dim()) +
                                " and " + std::to_string(b.dim()) + " differ");
}

}  // namespace nearcomm

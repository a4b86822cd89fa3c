#include "nearcomm/norms.hpp"

#include <algorithm>
#include <cmath>

#include "nearcomm/eig.hpp"

namespace nearcomm {

namespace {

// Eigenvalues of A†A, descending. Values below the eigensolver's resolution
// are numerical zeros; flooring them keeps sqrt from amplifying that noise
// into the singular values.
std::vector<double> gram_eigenvalues(const Matrix& a) {
    const Matrix b = a.adjoint() * a;
    const double floor = 1e-13 * b.frobenius_norm();
    EigResult e = hermitian_eig(b);
    for (auto& v : e.eigenvalues) v = v > floor ? v : 0.0;
    return e.eigenvalues;
}

}  // namespace

double operator_norm(const Matrix& a) {
    if (a.dim() == 1) return std::abs(a(0, 0));
    if (a.frobenius_norm() == 0.0) return 0.0;
    return std::sqrt(gram_eigenvalues(a).front());
}

double trace_norm(const Matrix& a) {
    if (a.dim() == 1) return std::abs(a(0, 0));
    if (a.frobenius_norm() == 0.0) return 0.0;
    double s = 0.0;
    for (double v : gram_eigenvalues(a)) s += std::sqrt(v);
    return s;
}

Matrix commutator(const Matrix& a, const Matrix& b) {
    check_same_dim(a, b, "commutator");
    return a * b - b * a;
}

}  // namespace nearcomm

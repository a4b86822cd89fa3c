#include "nearcomm/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nearcomm {

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    const int n = a.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace

EigResult hermitian_eig(const Matrix& a_in, double rel_tol) {
    const int n = a_in.dim();
    const double herm_dev = (a_in - a_in.adjoint()).max_abs();
    if (herm_dev > 2.0 * herm_tol(n))
        throw PreconditionViolation("hermitian_eig: input deviates from Hermitian by " +
                                    std::to_string(herm_dev));

    Matrix a = symmetrize(a_in);
    Matrix u = Matrix::identity(n);

    EigResult res{std::vector<double>(n, 0.0), Matrix::identity(n), 0, 0.0};
    const double norm_f = a.frobenius_norm();
    const double target = rel_tol * norm_f;

    if (n == 1 || norm_f == 0.0) {
        for (int i = 0; i < n; ++i) res.eigenvalues[i] = a(i, i).real();
    } else {
        const int max_sweeps = 30 * n * n;  // far beyond the usual ~10 sweeps
        bool converged = false;
        double off = off_diagonal_norm(a);
        int sweep = 0;
        // Skip pivots too small to matter for the convergence target.
        const double pivot_floor = target / (2.0 * n);
        while (sweep < max_sweeps) {
            if (off <= target) {
                converged = true;
                break;
            }
            ++sweep;
            for (int p = 0; p < n - 1; ++p) {
                for (int q = p + 1; q < n; ++q) {
                    const cplx apq = a(p, q);
                    const double r = std::abs(apq);
                    if (r <= pivot_floor) continue;

                    const double app = a(p, p).real();
                    const double aqq = a(q, q).real();
                    const cplx phase = apq / r;  // e^{i theta}
                    const double tau = (aqq - app) / (2.0 * r);
                    const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                     (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = t * c;
                    const cplx s_col = s * std::conj(phase);
                    const cplx s_row = s * phase;

                    // A <- J† A J with J mixing columns (p, q).
                    for (int k = 0; k < n; ++k) {
                        const cplx x = a(k, p), y = a(k, q);
                        a(k, p) = c * x - s_col * y;
                        a(k, q) = s * x + c * std::conj(phase) * y;
                    }
                    for (int k = 0; k < n; ++k) {
                        const cplx x = a(p, k), y = a(q, k);
                        a(p, k) = c * x - s_row * y;
                        a(q, k) = s * x + c * phase * y;
                    }
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    a(p, p) = cplx(a(p, p).real(), 0.0);
                    a(q, q) = cplx(a(q, q).real(), 0.0);

                    for (int k = 0; k < n; ++k) {
                        const cplx x = u(k, p), y = u(k, q);
                        u(k, p) = c * x - s_col * y;
                        u(k, q) = s * x + c * std::conj(phase) * y;
                    }
                }
            }
            off = off_diagonal_norm(a);
        }
        res.sweeps = sweep;
        res.off_norm = off;
        if (!converged && off > target)
            throw ConvergenceFailure("hermitian_eig: no convergence after rotation budget; "
                                     "off-diagonal norm " + std::to_string(off),
                                     off);
        for (int i = 0; i < n; ++i) res.eigenvalues[i] = a(i, i).real();
    }

    // Descending eigenvalue order, stable for ties.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return res.eigenvalues[i] > res.eigenvalues[j]; });

    std::vector<double> sorted_vals(n);
    Matrix sorted_vecs(n);
    for (int k = 0; k < n; ++k) {
        sorted_vals[k] = res.eigenvalues[order[k]];
        for (int i = 0; i < n; ++i) sorted_vecs(i, k) = u(i, order[k]);
    }
    res.eigenvalues = std::move(sorted_vals);
    res.eigenvectors = std::move(sorted_vecs);
    return res;
}

}  // namespace nearcomm

#pragma once

#include <vector>

#include "nearcomm/complex_matrix.hpp"

namespace nearcomm {

struct EigResult {
    std::vector<double> eigenvalues;  // descending
    Matrix eigenvectors;              // unitary, column k pairs with eigenvalues[k]
    int sweeps = 0;
    double off_norm = 0.0;            // off-diagonal Frobenius mass at exit
};

// Cyclic Jacobi diagonalization of a Hermitian matrix.
// Input is symmetrized internally; rejects matrices that are not Hermitian
// within herm_tol(dim). Converges when the off-diagonal Frobenius mass drops
// below rel_tol * ||A||_F; the sweep cap is 30 * dim^2, far beyond the usual
// ten or so. Throws ConvergenceFailure with the final off-diagonal norm on
// exhaustion.
EigResult hermitian_eig(const Matrix& a, double rel_tol = 1e-14);

}  // namespace nearcomm

#include "nearcomm/pinch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nearcomm/eig.hpp"

namespace nearcomm {

Matrix pinch(const Matrix& a, const std::vector<std::vector<int>>& blocks) {
    const int n = a.dim();
    std::vector<int> block_of(n, -1);
    for (size_t b = 0; b < blocks.size(); ++b) {
        for (int i : blocks[b]) {
            if (i < 0 || i >= n)
                throw InvalidPartition("pinch: index " + std::to_string(i) + " out of range");
            if (block_of[i] != -1)
                throw InvalidPartition("pinch: index " + std::to_string(i) +
                                       " appears in more than one block");
            block_of[i] = static_cast<int>(b);
        }
    }
    for (int i = 0; i < n; ++i)
        if (block_of[i] == -1)
            throw InvalidPartition("pinch: index " + std::to_string(i) + " not covered");

    Matrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (block_of[i] == block_of[j]) r(i, j) = a(i, j);
    return r;
}

RoundedProjection round_to_projection(const HermitianOperator& p, double delta) {
    if (!(delta > 0.0) || delta >= 0.5)
        throw PreconditionViolation("round_to_projection: delta must lie in (0, 1/2), got " +
                                    std::to_string(delta));
    const EigResult e = hermitian_eig(p.matrix());
    double gap = 0.0;       // max |p^2 - p|
    double distance = 0.0;  // max distance to the rounded {0,1} value
    std::vector<int> kept;
    for (int i = 0; i < p.dim(); ++i) {
        const double v = e.eigenvalues[i];
        gap = std::max(gap, std::abs(v * v - v));
        if (v > 0.5) {
            kept.push_back(i);
            distance = std::max(distance, std::abs(1.0 - v));
        } else {
            distance = std::max(distance, std::abs(v));
        }
    }
    if (gap >= delta)
        throw PreconditionViolation("round_to_projection: ||P^2 - P|| = " + std::to_string(gap) +
                                    " >= delta = " + std::to_string(delta));
    OrthoProjection proj = kept.empty()
                               ? OrthoProjection::zero(p.dim())
                               : OrthoProjection::from_basis_columns(e.eigenvectors, kept);
    return RoundedProjection{std::move(proj), distance, gap};
}

}  // namespace nearcomm

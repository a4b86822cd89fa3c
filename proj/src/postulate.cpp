#include "nearcomm/postulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nearcomm/norms.hpp"
#include "nearcomm/pinch.hpp"

namespace nearcomm {

namespace {

// Conjugate back from the eigenbasis: U A U†.
Matrix from_basis(const Matrix& basis, const Matrix& a) {
    return basis * a * basis.adjoint();
}

// Conjugate into the eigenbasis: U† A U.
Matrix to_basis(const Matrix& basis, const Matrix& a) {
    return basis.adjoint() * a * basis;
}

std::vector<std::vector<int>> blocks_with_kernel(const SpectralDecomposition& dec) {
    std::vector<std::vector<int>> blocks = dec.groups;
    if (!dec.kernel_group.empty()) blocks.push_back(dec.kernel_group);
    return blocks;
}

}  // namespace

PinchedObservable pinch_observable(const HermitianOperator& x, const DensityMatrix& rho,
                                   double tol_degeneracy) {
    if (x.dim() != rho.dim()) throw DimensionMismatch("pinch_observable: dimension mismatch");
    const int m = x.dim();
    const SpectralDecomposition dec = decompose(rho, tol_degeneracy);

    if (dec.distinct_values.empty())
        throw PreconditionViolation("pinch_observable: state has no nonzero eigenvalue group");
    // Trailing gap to zero appended; a single full-space block (gamma = its
    // eigenvalue) makes the pinch the identity map.
    const double gamma = min_gap(dec.distinct_values, true);
    if (gamma <= dec.tol_degeneracy)
        throw PreconditionViolation("pinch_observable: spectral gap " + std::to_string(gamma) +
                                    " at or below the degeneracy tolerance; use the binning "
                                    "construction for gapless states");

    const Matrix y = to_basis(dec.eigenbasis, x.matrix());
    const Matrix x_prime_mat = from_basis(dec.eigenbasis, pinch(y, blocks_with_kernel(dec)));
    HermitianOperator x_prime(x_prime_mat);

    PinchCertificate cert;
    cert.dim = m;
    cert.gap = gamma;
    cert.eps = operator_norm(commutator(rho.matrix(), x.matrix()));
    cert.achieved = operator_norm(x.matrix() - x_prime.matrix());
    cert.residual = operator_norm(commutator(rho.matrix(), x_prime.matrix()));
    cert.claimed_bound = static_cast<double>(m) * m * cert.eps / gamma;
    const double n_distinct = static_cast<double>(dec.distinct_values.size());
    cert.block_count_bound = (n_distinct + 1.0) * n_distinct * cert.eps / gamma;
    return PinchedObservable{std::move(x_prime), cert};
}

PinchedState pinch_state(const DensityMatrix& rho, const HermitianOperator& x,
                         double tol_degeneracy) {
    if (x.dim() != rho.dim()) throw DimensionMismatch("pinch_state: dimension mismatch");
    const int m = x.dim();
    const SpectralDecomposition dec = decompose(x, tol_degeneracy, false);

    const double gamma = min_gap(dec.distinct_values, false);  // +inf for a single value
    const Matrix r_basis = to_basis(dec.eigenbasis, rho.matrix());
    const Matrix rho_prime_mat = from_basis(dec.eigenbasis, pinch(r_basis, dec.groups));
    DensityMatrix rho_prime{HermitianOperator(rho_prime_mat)};

    PinchCertificate cert;
    cert.dim = m;
    cert.gap = gamma;
    cert.eps = operator_norm(commutator(rho.matrix(), x.matrix()));
    cert.achieved = trace_norm(rho.matrix() - rho_prime.matrix());
    cert.residual = operator_norm(commutator(rho_prime.matrix(), x.matrix()));
    cert.claimed_bound = std::isinf(gamma) ? 0.0
                                           : static_cast<double>(m) * m * m * cert.eps / gamma;
    const double k = static_cast<double>(dec.distinct_values.size());
    cert.block_count_bound =
        std::isinf(gamma) ? 0.0 : static_cast<double>(m) * (k - 1.0) * k * cert.eps / gamma;

    double born_dev = 0.0;
    for (size_t g = 0; g < dec.groups.size(); ++g) {
        const Matrix p = dec.projector(static_cast<int>(g)).matrix();
        cplx win = 0.0, wout = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                win += rho.matrix()(i, j) * p(j, i);
                wout += rho_prime.matrix()(i, j) * p(j, i);
            }
        born_dev = std::max(born_dev, std::abs(win.real() - wout.real()));
    }
    return PinchedState{std::move(rho_prime), cert, born_dev};
}

QuantizedObservable quantize_observable(const HermitianOperator& x, double eps,
                                        double tol_degeneracy) {
    const SpectralDecomposition dec = decompose(x, tol_degeneracy, false);
    IntervalCover cover = build_cover(dec.distinct_values, eps);

    // Map each cover cluster (ascending) to the eigenvalue groups it holds.
    // distinct_values is descending: index g corresponds to sorted position.
    const int n_distinct = static_cast<int>(dec.distinct_values.size());
    std::vector<int> sorted_to_group(n_distinct);
    for (int g = 0; g < n_distinct; ++g) sorted_to_group[n_distinct - 1 - g] = g;

    QuantizedObservable out{HermitianOperator(Matrix(x.dim())), ObservableSpec{}, IntervalCover{}, 0.0};
    Matrix acc(x.dim());
    // Walk the cover from the top so spec.values ends up descending.
    for (int c = static_cast<int>(cover.members.size()) - 1; c >= 0; --c) {
        const double xi = cover.midpoints[c];
        std::vector<int> cols;
        double shift = 0.0;
        for (int sorted_idx : cover.members[c]) {
            const int g = sorted_to_group[sorted_idx];
            for (int col : dec.groups[g]) cols.push_back(col);
            for (int col : dec.groups[g])
                shift = std::max(shift, std::abs(dec.raw_eigenvalues[col] - xi));
        }
        std::sort(cols.begin(), cols.end());
        OrthoProjection proj = OrthoProjection::from_basis_columns(dec.eigenbasis, cols);
        acc += cplx(xi, 0.0) * proj.matrix();
        out.max_shift = std::max(out.max_shift, shift);
        out.spec.values.push_back(xi);
        out.spec.projections.push_back(std::move(proj));
    }
    out.x_prime = HermitianOperator(std::move(acc));
    out.cover = std::move(cover);
    if (out.max_shift > eps + 1e-12 * tolerance_scale())
        throw PreconditionViolation("quantize_observable: midpoint shift " +
                                    std::to_string(out.max_shift) + " exceeds eps");
    return out;
}

PostulateReport check_postulate(const DensityMatrix& rho_in, const DensityMatrix& rho_out,
                                const HermitianOperator& x, double eps, double born_tol) {
    if (rho_in.dim() != x.dim() || rho_out.dim() != x.dim())
        throw DimensionMismatch("check_postulate: dimension mismatch");
    if (!(eps > 0.0)) throw PreconditionViolation("check_postulate: eps must be positive");
    const int m = x.dim();

    PostulateReport rep;
    rep.eps = eps;
    rep.born_tol = born_tol;
    rep.commutator_norm = operator_norm(commutator(rho_out.matrix(), x.matrix()));

    const ObservableSpec exact = observable_spec(x);
    for (size_t k = 0; k < exact.count(); ++k) {
        const Matrix& p = exact.projections[k].matrix();
        cplx win = 0.0, wout = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                win += rho_in.matrix()(i, j) * p(j, i);
                wout += rho_out.matrix()(i, j) * p(j, i);
            }
        rep.born_discrepancy = std::max(rep.born_discrepancy, std::abs(win.real() - wout.real()));
    }

    const QuantizedObservable q = quantize_observable(x, eps);
    Matrix pinched(m);
    for (size_t k = 0; k < q.spec.count(); ++k) {
        const Matrix& p = q.spec.projections[k].matrix();
        cplx win = 0.0, wout = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                win += rho_in.matrix()(i, j) * p(j, i);
                wout += rho_out.matrix()(i, j) * p(j, i);
            }
        rep.born_discrepancy_cover =
            std::max(rep.born_discrepancy_cover, std::abs(win.real() - wout.real()));
        pinched += p * rho_out.matrix() * p;
    }
    rep.block_residual = trace_norm(rho_out.matrix() - pinched);

    rep.verdict_amended = rep.commutator_norm < eps;
    rep.verdict_born =
        std::max(rep.born_discrepancy, rep.born_discrepancy_cover) <= born_tol;
    return rep;
}

}  // namespace nearcomm

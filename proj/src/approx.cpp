#include "nearcomm/approx.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nearcomm/norms.hpp"
#include "nearcomm/pinch.hpp"

namespace nearcomm {

void BinningParams::validate() const {
    if (!(eps >= 0.0) || !std::isfinite(eps))
        throw PreconditionViolation("BinningParams: eps must be finite and >= 0");
    if (!(delta_exp > 0.0 && delta_exp < beta_exp && beta_exp < 1.0))
        throw PreconditionViolation("BinningParams: need 0 < delta_exp < beta_exp < 1");
    if (!(beta_exp > 2.0 * delta_exp))
        throw PreconditionViolation("BinningParams: need beta_exp > 2*delta_exp");
}

int GapBinning::head_count() const {
    int c = 0;
    for (const auto& b : bins) c += static_cast<int>(b.members_asc.size());
    return c;
}

GapBinning gap_binning(const SpectralDecomposition& dec, const BinningParams& params) {
    params.validate();
    if (!(params.eps > 0.0))
        throw PreconditionViolation("gap_binning: eps must be positive");

    GapBinning out;
    out.dim = dec.dim();
    out.eps_delta = std::pow(params.eps, params.delta_exp);
    out.eps_beta = std::pow(params.eps, params.beta_exp);

    const int n = out.dim;
    out.asc_eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) out.asc_eigenvalues[i] = dec.raw_eigenvalues[n - 1 - i];
    const auto& w = out.asc_eigenvalues;

    // First bin opener: smallest eigenvalue of size eps^delta whose gap to the
    // next smaller eigenvalue (or to 0 when it is the smallest) reaches
    // eps^beta.
    int first = -1;
    for (int i = 0; i < n; ++i) {
        if (w[i] < out.eps_delta) continue;
        const double pred = (i == 0) ? 0.0 : w[i - 1];
        if (w[i] - pred >= out.eps_beta) {
            first = i;
            break;
        }
    }

    if (first < 0) {
        for (int i = 0; i < n; ++i) out.zero_bin.push_back(i);
        out.zero_bin_hi = n > 0 ? std::max(0.0, w[n - 1]) : 0.0;
        return out;
    }

    for (int i = 0; i < first; ++i) out.zero_bin.push_back(i);
    out.zero_bin_hi = first > 0 ? std::max(0.0, w[first - 1]) : 0.0;

    SpectralBin bin;
    bin.members_asc.push_back(first);
    bin.representative = w[first];
    bin.lo = w[first];
    out.precursors.push_back(first > 0 ? w[first - 1] : 0.0);
    for (int i = first + 1; i < n; ++i) {
        if (w[i] - w[i - 1] >= out.eps_beta) {
            bin.hi = w[i - 1];
            out.bins.push_back(std::move(bin));
            bin = SpectralBin{};
            bin.representative = w[i];
            bin.lo = w[i];
            out.precursors.push_back(w[i - 1]);
        }
        bin.members_asc.push_back(i);
    }
    bin.hi = w[n - 1];
    out.bins.push_back(std::move(bin));

    if (params.mean_representative) {
        for (auto& b : out.bins) {
            double s = 0.0;
            for (int i : b.members_asc) s += w[i];
            b.representative = s / static_cast<double>(b.members_asc.size());
        }
    }
    return out;
}

FlattenedState flatten_state(const SpectralDecomposition& dec, const GapBinning& binning) {
    const int n = dec.dim();
    if (binning.dim != n) throw DimensionMismatch("flatten_state: binning dimension mismatch");

    std::vector<double> flat(n, 0.0);  // ascending order
    FlattenedState out{HermitianOperator(Matrix(n)), 0.0, 0.0, 0.0};
    for (int i : binning.zero_bin)
        out.zero_bin_loss += std::abs(binning.asc_eigenvalues[i]);
    for (const auto& bin : binning.bins)
        for (int i : bin.members_asc) {
            flat[i] = bin.representative;
            out.flatten_loss += std::abs(binning.asc_eigenvalues[i] - bin.representative);
        }
    out.trace_loss = out.zero_bin_loss + out.flatten_loss;

    // Rebuild in the stored (descending) basis order.
    Matrix d(n);
    for (int i = 0; i < n; ++i) d(n - 1 - i, n - 1 - i) = flat[i];
    const Matrix& u = dec.eigenbasis;
    out.omega_tilde = HermitianOperator(u * d * u.adjoint());
    return out;
}

CompressedObservable block_compress(const HermitianOperator& x, const SpectralDecomposition& dec,
                                    const GapBinning& binning) {
    const int n = dec.dim();
    if (x.dim() != n) throw DimensionMismatch("block_compress: dimension mismatch");
    if (binning.dim != n) throw DimensionMismatch("block_compress: binning dimension mismatch");

    // Blocks in descending-basis column indices; the zero bin is its own block.
    std::vector<std::vector<int>> blocks;
    if (!binning.zero_bin.empty()) {
        std::vector<int> blk;
        for (int i : binning.zero_bin) blk.push_back(n - 1 - i);
        blocks.push_back(std::move(blk));
    }
    for (const auto& bin : binning.bins) {
        std::vector<int> blk;
        for (int i : bin.members_asc) blk.push_back(n - 1 - i);
        blocks.push_back(std::move(blk));
    }

    const Matrix& u = dec.eigenbasis;
    const Matrix y = u.adjoint() * (x.matrix() * u);
    const Matrix compressed = pinch(y, blocks);

    // Row quantity of the discarded off-block part.
    std::vector<int> block_of(n, -1);
    for (size_t b = 0; b < blocks.size(); ++b)
        for (int c : blocks[b]) block_of[c] = static_cast<int>(b);
    double rowsum_max = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j)
            if (block_of[i] != block_of[j]) row += std::norm(y(i, j));
        rowsum_max = std::max(rowsum_max, row);
    }

    return CompressedObservable{HermitianOperator(u * compressed * u.adjoint()), rowsum_max};
}

CommutingApproximant commuting_approximants(const DensityMatrix& rho, const HermitianOperator& x,
                                            const BinningParams& params) {
    params.validate();
    if (rho.dim() != x.dim())
        throw DimensionMismatch("commuting_approximants: dimension mismatch");
    const int m = rho.dim();

    if (params.eps == 0.0) {
        ApproxCertificate cert;
        cert.params = params;
        cert.eps_measured = operator_norm(commutator(rho.matrix(), x.matrix()));
        if (cert.eps_measured > herm_tol(m))
            throw PreconditionViolation(
                "commuting_approximants: eps = 0 passthrough requires an exactly commuting "
                "pair, measured " + std::to_string(cert.eps_measured));
        cert.residual = cert.eps_measured;
        return CommutingApproximant{rho, x, cert};
    }

    // Theorem hypothesis ||X|| <= 1: rescale and record otherwise.
    double scale = 1.0;
    const double x_norm = operator_norm(x.matrix());
    Matrix x_used = x.matrix();
    if (x_norm > 1.0 + 1e-12 * tolerance_scale()) {
        scale = x_norm;
        x_used *= cplx(1.0 / scale, 0.0);
    }

    const double eps_measured = operator_norm(commutator(rho.matrix(), x_used));
    if (eps_measured > params.eps * (1.0 + 1e-12))
        throw PreconditionViolation("commuting_approximants: measured commutator norm " +
                                    std::to_string(eps_measured) + " exceeds params.eps = " +
                                    std::to_string(params.eps));

    const SpectralDecomposition dec = decompose(rho);
    const GapBinning binning = gap_binning(dec, params);
    if (binning.bins.empty())
        throw PreconditionViolation(
            "commuting_approximants: every eigenvalue falls below the eps^delta threshold "
            "(spectral tail too heavy); no state mass survives the binning");

    const FlattenedState flat = flatten_state(dec, binning);
    const double tr_tilde = flat.omega_tilde.matrix().trace().real();
    DensityMatrix rho_prime{
        HermitianOperator(cplx(1.0 / tr_tilde, 0.0) * flat.omega_tilde.matrix())};

    CompressedObservable comp = block_compress(HermitianOperator(x_used), dec, binning);
    Matrix x_prime_mat = comp.x_prime.matrix();
    if (scale != 1.0) x_prime_mat *= cplx(scale, 0.0);
    HermitianOperator x_prime(std::move(x_prime_mat));

    ApproxCertificate cert;
    cert.params = params;
    cert.eps = params.eps;
    cert.eps_measured = eps_measured;
    cert.scale_factor = scale;
    cert.delta_eps = tail_weight(dec, params.eps);
    cert.dX = operator_norm(x.matrix() - x_prime.matrix());
    cert.dOmega = trace_norm(rho.matrix() - rho_prime.matrix());
    cert.residual = operator_norm(commutator(rho_prime.matrix(), x_prime.matrix()));
    cert.bound_dX = scale * std::pow(params.eps, 1.0 - params.beta_exp);
    cert.bound_dOmega = 2.0 * cert.delta_eps +
                        cert.C * std::pow(params.eps, params.beta_exp - 2.0 * params.delta_exp);
    cert.rowsum_max = comp.rowsum_max;
    cert.zero_bin_loss = flat.zero_bin_loss;
    cert.flatten_loss = flat.flatten_loss;
    return CommutingApproximant{std::move(rho_prime), std::move(x_prime), cert};
}

}  // namespace nearcomm

#pragma once

#include "nearcomm/spectral.hpp"

namespace nearcomm {

// Frozen constant in the state-distance bound
//   tr|rho - rho'| <= 2*Delta_eps + C * eps^(beta-2*delta).
// Calibrated empirically on a seed set disjoint from the acceptance suite
// (see README); generated instances stay below half of it.
inline constexpr double kStateBoundConstant = 2.0;

struct BinningParams {
    double eps = 0.0;
    double delta_exp = 0.25;
    double beta_exp = 0.75;
    // Experimental variant: represent each bin by the mean of its members
    // instead of the smallest one. Halves the flattening error but gives up
    // the monotonicity omega_tilde <= rho, so the certified dOmega bound is
    // only guaranteed for the default.
    bool mean_representative = false;

    // Requires eps >= 0 and 0 < delta < beta < 1 with beta > 2*delta.
    // eps == 0 is the exact-commutation passthrough.
    void validate() const;
};

struct SpectralBin {
    std::vector<int> members_asc;  // indices into the ascending eigenvalue list
    double representative = 0.0;   // smallest member eigenvalue
    double lo = 0.0, hi = 0.0;     // interval [omega_first, last member]
};

// Partition of the spectrum into a zero bin and gap-separated bins.
// Ascending index i refers to eigenvalue asc_eigenvalues[i]; bins are stored
// with strictly increasing representatives. Consecutive bins are separated by
// at least eps^beta while members inside a bin chain with gaps below it.
struct GapBinning {
    std::vector<double> asc_eigenvalues;
    std::vector<int> zero_bin;         // ascending indices below the first bin
    std::vector<SpectralBin> bins;     // ascending representatives
    std::vector<double> precursors;    // eigenvalue just below each bin (0 if none)
    double zero_bin_hi = 0.0;          // top of the zero bin interval [0, hi]
    double eps_delta = 0.0;            // candidate threshold eps^delta
    double eps_beta = 0.0;             // gap threshold eps^beta
    int dim = 0;

    int bin_count() const { return static_cast<int>(bins.size()); }
    int head_count() const;            // total members across bins
};

// Scan the spectrum bottom-up. The first bin opens at the smallest eigenvalue
// that reaches eps^delta and is separated from its predecessor (or from 0) by
// at least eps^beta; every further bin opens at a gap of at least eps^beta.
// Everything below the first bin lands in the zero bin.
GapBinning gap_binning(const SpectralDecomposition& dec, const BinningParams& params);

struct FlattenedState {
    HermitianOperator omega_tilde;  // eigenvalues replaced by bin representatives
    double trace_loss = 0.0;        // tr|rho - omega_tilde|
    double zero_bin_loss = 0.0;     // mass removed with the zero bin
    double flatten_loss = 0.0;      // in-bin flattening mass
};

// Replace each eigenvalue by its bin representative (zero on the zero bin),
// keeping the eigenbasis. The state only loses mass: omega_tilde <= rho.
FlattenedState flatten_state(const SpectralDecomposition& dec, const GapBinning& binning);

struct CompressedObservable {
    HermitianOperator x_prime;
    double rowsum_max = 0.0;  // sup_i sum_{j off-block} |<u_j, X u_i>|^2
};

// Kill the matrix elements of X that connect different bins (the zero bin
// counts as a block of its own) in the eigenbasis of the state. The recorded
// row quantity obeys rowsum_max <= eps^(2(1-beta)).
CompressedObservable block_compress(const HermitianOperator& x, const SpectralDecomposition& dec,
                                    const GapBinning& binning);

struct ApproxCertificate {
    double eps = 0.0;           // working eps (params.eps)
    double eps_measured = 0.0;  // ||[rho, X]||_op after any rescale of X
    double delta_eps = 0.0;     // spectral tail weight of rho at eps^{1/4}
    double dX = 0.0;            // ||X - X'||_op (input scale)
    double dOmega = 0.0;        // tr|rho - rho'|
    double residual = 0.0;      // ||[rho', X']||_op
    double bound_dX = 0.0;      // scale * eps^(1-beta)
    double bound_dOmega = 0.0;  // 2*Delta_eps + C * eps^(beta-2*delta)
    double C = kStateBoundConstant;
    double scale_factor = 1.0;  // ||X||_op when X had to be rescaled, else 1
    double rowsum_max = 0.0;
    double zero_bin_loss = 0.0;
    double flatten_loss = 0.0;
    BinningParams params;

    bool pass_dX() const { return dX <= bound_dX; }
    bool pass_dOmega() const { return dOmega <= bound_dOmega; }
};

struct CommutingApproximant {
    DensityMatrix rho_prime;
    HermitianOperator x_prime;
    ApproxCertificate cert;
};

// Replace an almost-commuting pair (rho, X), ||X|| <= 1 (rescaled and
// recorded otherwise), ||[rho, X]|| <= params.eps, by an exactly commuting
// pair: bin the spectrum of rho, flatten to bin representatives, renormalize,
// and block-compress X. params.eps == 0 returns the pair unchanged.
// Fails when every eigenvalue falls into the zero bin (tail weight too large
// for the construction to leave any state behind).
CommutingApproximant commuting_approximants(const DensityMatrix& rho, const HermitianOperator& x,
                                            const BinningParams& params);

}  // namespace nearcomm

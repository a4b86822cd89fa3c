#pragma once

#include "nearcomm/spectral.hpp"

namespace nearcomm {

// Bound certificate for the pinching constructions. `claimed_bound` is the
// dimension-counted form M^2 eps / gap (observable pinch) or
// M^3 eps / gap (state pinch); `block_count_bound` is the sharper
// block-counted form recorded alongside it. An infinite gap (single distinct
// eigenvalue, nothing to pinch away) yields zero bounds and zero distance.
struct PinchCertificate {
    double eps = 0.0;               // measured ||[rho, X]||_op on input
    double gap = 0.0;               // gamma of the spectrum that defines the blocks
    int dim = 0;
    double claimed_bound = 0.0;
    double block_count_bound = 0.0;
    double achieved = 0.0;          // ||X - X'||_op resp. tr|rho - rho'|
    double residual = 0.0;          // commutator norm of the output pair
};

struct PinchedObservable {
    HermitianOperator x_prime;
    PinchCertificate cert;
};

struct PinchedState {
    DensityMatrix rho_prime;
    PinchCertificate cert;
    double born_discrepancy = 0.0;  // max_k |tr(rho Pi_k) - tr(rho' Pi_k)|
};

// X' = sum_n pi_n X pi_n over the eigenprojections of rho (kernel included
// as its own block). gamma is the minimal gap of rho's distinct eigenvalues
// with 0 appended. Rejects gamma <= tol_degeneracy.
PinchedObservable pinch_observable(const HermitianOperator& x, const DensityMatrix& rho,
                                   double tol_degeneracy = -1.0);

// rho' = sum_k Pi_k rho Pi_k over the eigenprojections of X. gamma is the
// minimal gap of X's distinct eigenvalues (no appended zero). Born weights
// against X's projections are preserved exactly.
PinchedState pinch_state(const DensityMatrix& rho, const HermitianOperator& x,
                         double tol_degeneracy = -1.0);

struct QuantizedObservable {
    HermitianOperator x_prime;
    ObservableSpec spec;      // interval midpoints with their projections
    IntervalCover cover;
    double max_shift = 0.0;   // max |eigenvalue - assigned midpoint|, <= eps
};

// Replace X by a finite-spectrum observable: cover spec(X) with intervals of
// length <= 2*eps and collapse each interval to its midpoint.
QuantizedObservable quantize_observable(const HermitianOperator& x, double eps,
                                        double tol_degeneracy = -1.0);

struct PostulateReport {
    double commutator_norm = 0.0;        // ||[rho_out, X]||_op
    double born_discrepancy = 0.0;       // vs X's exact eigenprojections
    double born_discrepancy_cover = 0.0; // vs the 2*eps interval projections
    double block_residual = 0.0;         // tr|rho_out - sum_k Pi_k rho_out Pi_k| (cover blocks)
    bool verdict_amended = false;        // commutator_norm < eps
    bool verdict_born = false;           // born discrepancies within born_tol
    double eps = 0.0;
    double born_tol = 0.0;
};

// Diagnostic scorecard: does rho_out satisfy the amended commutation
// requirement against X at scale eps, and does it preserve the outcome
// distribution of rho_in?
PostulateReport check_postulate(const DensityMatrix& rho_in, const DensityMatrix& rho_out,
                                const HermitianOperator& x, double eps,
                                double born_tol = 1e-10);

}  // namespace nearcomm

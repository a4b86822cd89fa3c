#pragma once

#include "nearcomm/pinch.hpp"
#include "nearcomm/spectral.hpp"

namespace nearcomm {

// Family of mutually orthogonal projections resolving the identity.
class EventPartition {
public:
    explicit EventPartition(std::vector<OrthoProjection> cells, double tol = -1.0);

    static EventPartition from_decomposition(const SpectralDecomposition& dec);

    const std::vector<OrthoProjection>& cells() const { return cells_; }
    size_t size() const { return cells_.size(); }
    int dim() const { return cells_.front().dim(); }

private:
    std::vector<OrthoProjection> cells_;
};

// tr|rho - sum_n pi_n rho pi_n|: how far rho is from being a statistical
// mixture over the event cells.
double check_actuality(const DensityMatrix& rho, const EventPartition& e);

// Event cells reordered by descending Born weight and split at the smallest
// n0 whose head prefix carries more than 1 - eps of the weight. The tail
// projection collects the remaining cells (possibly none: rank 0).
struct TruncatedEvent {
    std::vector<OrthoProjection> head;  // n0 - 1 cells, descending weight
    std::vector<double> head_weights;
    OrthoProjection tail;
    double tail_probability = 0.0;
    int n0 = 0;                         // 1-based in weight order
    std::vector<int> weight_order;      // original cell index per sorted slot
};

TruncatedEvent truncate_tail(const DensityMatrix& rho, const EventPartition& e, double eps);

// Greedy assignment of head cells to observable outcomes: cell n joins the
// index set of the k maximizing tr(pi_n Pi_k pi_n)/tr(pi_n), ties toward
// smaller k. Diagnostics record the compatibility scale of the two families.
struct IndexAssignment {
    std::vector<std::vector<int>> index_sets;  // per outcome k: head cell slots
    double max_comm = 0.0;                     // max ||[pi_n, Pi_k]|| incl. the tail cell
    std::vector<double> leakage;               // per k: sum of off-set overlaps
    bool comm_ok = false;                      // max_comm < c1 * n0^{-2} * eps
    bool leakage_ok = false;                   // every leakage_k < c2 * eps
    double c1 = 1.0, c2 = 1.0;
};

IndexAssignment assign_index_sets(const TruncatedEvent& trunc, const ObservableSpec& obs,
                                  double eps, double c1 = 1.0, double c2 = 1.0);

// The four-step interpretation chain.
//   X'    pinches X over the truncated event (tail cell included),
//   X''   re-weights head blocks by outcome values xi_k,
//   X'''  rounds each pi_n Pi_k pi_n to an exact sub-projection of pi_n,
//   X_fin drops the tail block.
struct ChainDiagnostics {
    double d1 = 0.0;  // ||X' - X||
    double d2 = 0.0;  // ||X'' - X'||
    double d3 = 0.0;  // ||X''' - X||
    double fin_comms = 0.0;       // max_n ||[X_fin, pi_n]||, tail included
    double max_round_dist = 0.0;  // worst ||pi_hat - pi_n Pi_k pi_n||
    double max_round_gap = 0.0;   // worst ||P^2 - P|| fed into the rounding
};

struct MeasurementChain {
    HermitianOperator x_prime;
    HermitianOperator x_dprime;
    HermitianOperator x_tprime;
    HermitianOperator x_fin;
    std::vector<std::vector<OrthoProjection>> rounded;  // aligned with index_sets
    ChainDiagnostics diag;
};

MeasurementChain build_measurement_chain(const HermitianOperator& x, const TruncatedEvent& trunc,
                                         const ObservableSpec& obs,
                                         const IndexAssignment& assignment);

// Verification report for the chain output:
//  (i)   the discarded tail carries weight at most eps,
//  (ii)  X''' commutes with the tail projection,
//  (iii) ||X''' - X|| stays below c3 * eps (threshold configurable),
//  (iv)  X_fin has spectrum {xi_k} U {0} and its eigenprojections match the
//        rounded sub-projections; X_fin commutes with every event cell.
struct TheoremReport {
    double tail_prob = 0.0;
    bool i_ok = false;
    double reduction_residual = 0.0;
    bool ii_ok = false;
    double d3 = 0.0;
    double d3_threshold = 0.0;
    bool iii_ok = false;
    double spectrum_residual = 0.0;    // eigenvalue distance to {xi_k} U {0}
    double projection_residual = 0.0;  // eigenprojection mismatch
    double fin_comm_residual = 0.0;
    bool iv_ok = false;
    bool all_ok = false;
};

TheoremReport verify_theorem_31(const DensityMatrix& rho, const MeasurementChain& chain,
                                const TruncatedEvent& trunc, const ObservableSpec& obs,
                                const HermitianOperator& x, double eps, double c3 = 1.0,
                                double tol = -1.0);

}  // namespace nearcomm

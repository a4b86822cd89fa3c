#pragma once

#include <limits>
#include <vector>

#include "nearcomm/eig.hpp"
#include "nearcomm/hermitian.hpp"

namespace nearcomm {

// Unit-trace positive semidefinite Hermitian matrix. Construction verifies
// trace within 1e-10 of 1 and eigenvalues >= -1e-12.
class DensityMatrix {
public:
    explicit DensityMatrix(HermitianOperator h);

    const Matrix& matrix() const { return h_.matrix(); }
    const HermitianOperator& op() const { return h_; }
    int dim() const { return h_.dim(); }

    static DensityMatrix diagonal(const std::vector<double>& values);

private:
    HermitianOperator h_;
};

// Spectral decomposition with eigenvalues grouped into degeneracy classes.
// Eigenvalues and eigenbasis columns run in descending order. Groups hold
// column indices; `kernel_group` (possibly empty) collects eigenvalues within
// the grouping tolerance of zero when the kernel split is requested, and such
// values then appear in no group.
struct SpectralDecomposition {
    std::vector<double> raw_eigenvalues;      // descending
    Matrix eigenbasis;                        // column k <-> raw_eigenvalues[k]
    std::vector<double> distinct_values;      // descending, one per group
    std::vector<std::vector<int>> groups;     // column index sets
    std::vector<double> group_weights;        // value * group size
    std::vector<int> kernel_group;            // column indices near zero
    double tol_degeneracy = 0.0;

    int dim() const { return eigenbasis.dim(); }
    OrthoProjection projector(int group) const;
    OrthoProjection kernel_projector() const;
};

// Eigen-decompose and group eigenvalues by greedy chaining: adjacent values
// in sorted order closer than tol_degeneracy share a group. Negative tol
// selects the default 1e-9 * ||A||_op. With split_kernel, the group whose
// value is within tol of zero becomes the kernel.
SpectralDecomposition decompose(const HermitianOperator& a, double tol_degeneracy = -1.0,
                                bool split_kernel = false);
SpectralDecomposition decompose(const DensityMatrix& rho, double tol_degeneracy = -1.0);

// Distinct eigenvalues (descending) paired with their eigenprojections.
struct ObservableSpec {
    std::vector<double> values;
    std::vector<OrthoProjection> projections;

    int dim() const { return projections.empty() ? 0 : projections.front().dim(); }
    size_t count() const { return values.size(); }
};

ObservableSpec observable_spec(const HermitianOperator& x, double tol_degeneracy = -1.0);

// Total weight sum(p_n) carried by eigenvalues at or below eps^{1/4}
// (kernel mass included).
double tail_weight(const DensityMatrix& rho, double eps);
double tail_weight(const SpectralDecomposition& dec, double eps);

// Minimum of consecutive differences of a strictly decreasing value list.
// append_zero adds the trailing gap to 0 (density-matrix convention).
// A single value with no appended zero has no gaps: returns +infinity.
double min_gap(const std::vector<double>& values_descending, bool append_zero);

// Born weights tr(rho * Pi_k), in the order of obs.values. Validates that
// the weights are nonnegative (>= -1e-12) and sum to 1 within 1e-10.
std::vector<double> born_distribution(const DensityMatrix& rho, const ObservableSpec& obs);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double mid() const { return 0.5 * (lo + hi); }
    double length() const { return hi - lo; }
};

// Closed intervals of length <= 2*eps covering the given spectrum points.
// Adjacent intervals share at most one endpoint; where the centered
// intervals would overlap they are clipped at the half-gap boundary, which
// never lands on a spectrum point.
struct IntervalCover {
    std::vector<Interval> intervals;   // ascending
    std::vector<double> midpoints;     // interval midpoints, ascending
    std::vector<std::vector<int>> members;  // indices into the sorted unique spectrum
    std::vector<double> sorted_spectrum;    // ascending unique input points
    double eps = 0.0;
};

IntervalCover build_cover(std::vector<double> spectrum, double eps);

}  // namespace nearcomm

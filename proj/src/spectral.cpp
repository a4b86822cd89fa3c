#include "nearcomm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nearcomm {

DensityMatrix::DensityMatrix(HermitianOperator h) : h_(std::move(h)) {
    const double tr = h_.matrix().trace().real();
    if (std::abs(tr - 1.0) > 1e-10 * tolerance_scale())
        throw PreconditionViolation("DensityMatrix: trace " + std::to_string(tr) +
                                    " deviates from 1");
    const EigResult e = hermitian_eig(h_.matrix());
    if (e.eigenvalues.back() < -1e-12 * tolerance_scale())
        throw PreconditionViolation("DensityMatrix: negative eigenvalue " +
                                    std::to_string(e.eigenvalues.back()));
}

DensityMatrix DensityMatrix::diagonal(const std::vector<double>& values) {
    return DensityMatrix(HermitianOperator::diagonal(values));
}

OrthoProjection SpectralDecomposition::projector(int group) const {
    return OrthoProjection::from_basis_columns(eigenbasis, groups.at(group));
}

OrthoProjection SpectralDecomposition::kernel_projector() const {
    if (kernel_group.empty()) return OrthoProjection::zero(dim());
    return OrthoProjection::from_basis_columns(eigenbasis, kernel_group);
}

SpectralDecomposition decompose(const HermitianOperator& a, double tol_degeneracy,
                                bool split_kernel) {
    EigResult e = hermitian_eig(a.matrix());
    const int n = a.dim();
    const double op_norm = std::max(std::abs(e.eigenvalues.front()), std::abs(e.eigenvalues.back()));
    if (tol_degeneracy < 0.0) tol_degeneracy = degeneracy_tol(op_norm);

    SpectralDecomposition dec{.eigenbasis = std::move(e.eigenvectors)};
    dec.raw_eigenvalues = e.eigenvalues;
    dec.tol_degeneracy = tol_degeneracy;

    // Greedy chaining over the descending list.
    std::vector<std::vector<int>> chains;
    for (int i = 0; i < n; ++i) {
        if (!chains.empty() &&
            dec.raw_eigenvalues[chains.back().back()] - dec.raw_eigenvalues[i] <= tol_degeneracy) {
            chains.back().push_back(i);
        } else {
            chains.push_back({i});
        }
    }

    for (auto& chain : chains) {
        double mean = 0.0;
        for (int i : chain) mean += dec.raw_eigenvalues[i];
        mean /= static_cast<double>(chain.size());
        if (split_kernel && std::abs(mean) <= tol_degeneracy) {
            dec.kernel_group = std::move(chain);
            continue;
        }
        dec.distinct_values.push_back(mean);
        dec.group_weights.push_back(mean * static_cast<double>(chain.size()));
        dec.groups.push_back(std::move(chain));
    }
    return dec;
}

SpectralDecomposition decompose(const DensityMatrix& rho, double tol_degeneracy) {
    return decompose(rho.op(), tol_degeneracy, true);
}

ObservableSpec observable_spec(const HermitianOperator& x, double tol_degeneracy) {
    const SpectralDecomposition dec = decompose(x, tol_degeneracy, false);
    ObservableSpec spec;
    for (size_t g = 0; g < dec.groups.size(); ++g) {
        spec.values.push_back(dec.distinct_values[g]);
        spec.projections.push_back(dec.projector(static_cast<int>(g)));
    }
    return spec;
}

double tail_weight(const SpectralDecomposition& dec, double eps) {
    if (!(eps > 0.0)) throw PreconditionViolation("tail_weight: eps must be positive");
    const double threshold = std::pow(eps, 0.25);
    double w = 0.0;
    for (size_t g = 0; g < dec.groups.size(); ++g)
        if (dec.distinct_values[g] <= threshold) w += dec.group_weights[g];
    for (int i : dec.kernel_group) w += dec.raw_eigenvalues[i];
    return w;
}

double tail_weight(const DensityMatrix& rho, double eps) {
    return tail_weight(decompose(rho), eps);
}

double min_gap(const std::vector<double>& values_descending, bool append_zero) {
    if (values_descending.empty())
        throw PreconditionViolation("min_gap: empty value list");
    for (size_t i = 1; i < values_descending.size(); ++i)
        if (!(values_descending[i - 1] > values_descending[i]))
            throw PreconditionViolation("min_gap: values must be strictly decreasing");
    double g = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < values_descending.size(); ++i)
        g = std::min(g, values_descending[i - 1] - values_descending[i]);
    if (append_zero) g = std::min(g, values_descending.back());
    if (!(g > 0.0))
        throw PreconditionViolation("min_gap: gap is not positive (smallest value " +
                                    std::to_string(values_descending.back()) + ")");
    return g;
}

std::vector<double> born_distribution(const DensityMatrix& rho, const ObservableSpec& obs) {
    if (obs.projections.empty())
        throw PreconditionViolation("born_distribution: empty observable");
    if (obs.dim() != rho.dim())
        throw DimensionMismatch("born_distribution: dimension mismatch");
    const Matrix& r = rho.matrix();
    std::vector<double> w;
    w.reserve(obs.count());
    double total = 0.0;
    for (const auto& proj : obs.projections) {
        const Matrix& p = proj.matrix();
        cplx t = 0.0;
        for (int i = 0; i < r.dim(); ++i)
            for (int j = 0; j < r.dim(); ++j) t += r(i, j) * p(j, i);
        const double wi = t.real();
        if (wi < -1e-12 * tolerance_scale())
            throw PreconditionViolation("born_distribution: negative weight " + std::to_string(wi));
        w.push_back(wi);
        total += wi;
    }
    if (std::abs(total - 1.0) > 1e-10 * tolerance_scale())
        throw PreconditionViolation("born_distribution: weights sum to " + std::to_string(total) +
                                    ", projections do not resolve the identity");
    return w;
}

IntervalCover build_cover(std::vector<double> spectrum, double eps) {
    if (spectrum.empty()) throw PreconditionViolation("build_cover: empty spectrum");
    if (!(eps > 0.0)) throw PreconditionViolation("build_cover: eps must be positive");
    for (double v : spectrum)
        if (!std::isfinite(v)) throw PreconditionViolation("build_cover: non-finite point");

    std::sort(spectrum.begin(), spectrum.end());
    spectrum.erase(std::unique(spectrum.begin(), spectrum.end()), spectrum.end());

    IntervalCover cover;
    cover.eps = eps;
    cover.sorted_spectrum = spectrum;

    // Greedy clusters: a cluster absorbs points while its span stays <= 2*eps.
    const int n = static_cast<int>(spectrum.size());
    int i = 0;
    while (i < n) {
        std::vector<int> cluster{i};
        int j = i + 1;
        while (j < n && spectrum[j] - spectrum[i] <= 2.0 * eps) cluster.push_back(j++);
        const double center = 0.5 * (spectrum[i] + spectrum[j - 1]);
        cover.intervals.push_back(Interval{center - eps, center + eps});
        cover.members.push_back(std::move(cluster));
        i = j;
    }

    // Clip overlapping neighbours so they share exactly one endpoint, placed
    // halfway into the spectral gap (never on a spectrum point).
    for (size_t k = 0; k + 1 < cover.intervals.size(); ++k) {
        Interval& a = cover.intervals[k];
        Interval& b = cover.intervals[k + 1];
        const double hi_pt = spectrum[cover.members[k].back()];
        const double lo_pt = spectrum[cover.members[k + 1].front()];
        if (a.hi >= b.lo) {
            const double boundary = 0.5 * (hi_pt + lo_pt);
            // clamp, never extend: keeps every length <= 2*eps
            a.hi = std::min(a.hi, boundary);
            b.lo = std::max(b.lo, boundary);
        }
    }
    for (const Interval& iv : cover.intervals) cover.midpoints.push_back(iv.mid());
    return cover;
}

}  // namespace nearcomm

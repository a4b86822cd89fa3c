#include "nearcomm/events.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nearcomm/norms.hpp"

namespace nearcomm {

namespace {

double real_trace_product(const Matrix& a, const Matrix& b) {
    cplx t = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) t += a(i, j) * b(j, i);
    return t.real();
}

}  // namespace

EventPartition::EventPartition(std::vector<OrthoProjection> cells, double tol)
    : cells_(std::move(cells)) {
    if (cells_.empty()) throw PreconditionViolation("EventPartition: no cells");
    const int n = cells_.front().dim();
    if (tol < 0.0) tol = proj_tol(n);
    Matrix sum(n);
    for (size_t a = 0; a < cells_.size(); ++a) {
        if (cells_[a].dim() != n) throw DimensionMismatch("EventPartition: mixed dimensions");
        sum += cells_[a].matrix();
        for (size_t b = a + 1; b < cells_.size(); ++b) {
            const double overlap = (cells_[a].matrix() * cells_[b].matrix()).frobenius_norm();
            if (overlap > tol)
                throw PreconditionViolation("EventPartition: cells " + std::to_string(a) +
                                            " and " + std::to_string(b) +
                                            " overlap with norm " + std::to_string(overlap));
        }
    }
    if ((sum - Matrix::identity(n)).frobenius_norm() > tol)
        throw PreconditionViolation("EventPartition: cells do not resolve the identity");
}

EventPartition EventPartition::from_decomposition(const SpectralDecomposition& dec) {
    std::vector<OrthoProjection> cells;
    for (size_t g = 0; g < dec.groups.size(); ++g)
        cells.push_back(dec.projector(static_cast<int>(g)));
    if (!dec.kernel_group.empty()) cells.push_back(dec.kernel_projector());
    return EventPartition(std::move(cells));
}

double check_actuality(const DensityMatrix& rho, const EventPartition& e) {
    if (rho.dim() != e.dim()) throw DimensionMismatch("check_actuality: dimension mismatch");
    Matrix pinched(rho.dim());
    for (const auto& cell : e.cells()) pinched += cell.matrix() * rho.matrix() * cell.matrix();
    return trace_norm(rho.matrix() - pinched);
}

TruncatedEvent truncate_tail(const DensityMatrix& rho, const EventPartition& e, double eps) {
    if (rho.dim() != e.dim()) throw DimensionMismatch("truncate_tail: dimension mismatch");
    if (!(eps > 0.0 && eps < 1.0))
        throw PreconditionViolation("truncate_tail: eps must lie in (0, 1)");

    const size_t n_cells = e.size();
    std::vector<double> weights(n_cells);
    for (size_t i = 0; i < n_cells; ++i)
        weights[i] = real_trace_product(rho.matrix(), e.cells()[i].matrix());

    TruncatedEvent out{.tail = OrthoProjection::zero(rho.dim())};
    out.weight_order.resize(n_cells);
    std::iota(out.weight_order.begin(), out.weight_order.end(), 0);
    std::stable_sort(out.weight_order.begin(), out.weight_order.end(),
                     [&](int a, int b) { return weights[a] > weights[b]; });

    // Smallest 1-based n0 whose strict-prefix weight exceeds 1 - eps.
    size_t n0 = n_cells + 1;
    double prefix = 0.0;
    for (size_t s = 0; s < n_cells; ++s) {
        if (prefix > 1.0 - eps) {
            n0 = s + 1;
            break;
        }
        prefix += weights[out.weight_order[s]];
    }
    out.n0 = static_cast<int>(n0);

    Matrix tail_sum(rho.dim());
    for (size_t s = 0; s < n_cells; ++s) {
        const int cell = out.weight_order[s];
        if (s + 1 < n0) {
            out.head.push_back(e.cells()[cell]);
            out.head_weights.push_back(weights[cell]);
        } else {
            tail_sum += e.cells()[cell].matrix();
            out.tail_probability += weights[cell];
        }
    }
    out.tail = OrthoProjection(HermitianOperator(std::move(tail_sum)));
    return out;
}

IndexAssignment assign_index_sets(const TruncatedEvent& trunc, const ObservableSpec& obs,
                                  double eps, double c1, double c2) {
    if (obs.count() == 0) throw PreconditionViolation("assign_index_sets: empty observable");
    if (!(eps > 0.0)) throw PreconditionViolation("assign_index_sets: eps must be positive");
    const size_t n_outcomes = obs.count();
    const size_t n_head = trunc.head.size();

    IndexAssignment out;
    out.c1 = c1;
    out.c2 = c2;
    out.index_sets.assign(n_outcomes, {});
    out.leakage.assign(n_outcomes, 0.0);

    // overlap(n, k) = tr(pi_n Pi_k pi_n) / tr(pi_n); rows are head slots.
    std::vector<std::vector<double>> share(n_head, std::vector<double>(n_outcomes, 0.0));
    for (size_t s = 0; s < n_head; ++s) {
        const Matrix& pi = trunc.head[s].matrix();
        const double rank = static_cast<double>(trunc.head[s].rank());
        if (rank == 0.0)
            throw PreconditionViolation("assign_index_sets: head cell of rank zero");
        size_t best = 0;
        double best_share = -1.0;
        for (size_t k = 0; k < n_outcomes; ++k) {
            share[s][k] = real_trace_product(pi, obs.projections[k].matrix()) / rank;
            if (share[s][k] > best_share) {  // strict: ties stay with smaller k
                best_share = share[s][k];
                best = k;
            }
        }
        out.index_sets[best].push_back(static_cast<int>(s));
    }

    std::vector<size_t> owner(n_head, 0);
    for (size_t k = 0; k < n_outcomes; ++k)
        for (int s : out.index_sets[k]) owner[static_cast<size_t>(s)] = k;
    for (size_t s = 0; s < n_head; ++s) {
        const Matrix& pi = trunc.head[s].matrix();
        for (size_t k = 0; k < n_outcomes; ++k) {
            if (owner[s] == k) continue;
            out.leakage[k] += operator_norm(pi * obs.projections[k].matrix() * pi);
        }
    }

    for (size_t k = 0; k < n_outcomes; ++k) {
        for (size_t s = 0; s < n_head; ++s)
            out.max_comm = std::max(out.max_comm,
                                    operator_norm(commutator(trunc.head[s].matrix(),
                                                             obs.projections[k].matrix())));
        if (trunc.tail.rank() > 0)
            out.max_comm = std::max(out.max_comm,
                                    operator_norm(commutator(trunc.tail.matrix(),
                                                             obs.projections[k].matrix())));
    }

    const double n0 = static_cast<double>(trunc.n0);
    out.comm_ok = out.max_comm < c1 * eps / (n0 * n0);
    out.leakage_ok = true;
    for (double l : out.leakage)
        if (!(l < c2 * eps)) out.leakage_ok = false;
    return out;
}

MeasurementChain build_measurement_chain(const HermitianOperator& x, const TruncatedEvent& trunc,
                                         const ObservableSpec& obs,
                                         const IndexAssignment& assignment) {
    const int m = x.dim();
    if (!trunc.head.empty() && trunc.head.front().dim() != m)
        throw DimensionMismatch("build_measurement_chain: dimension mismatch");
    if (assignment.index_sets.size() != obs.count())
        throw PreconditionViolation("build_measurement_chain: assignment does not match observable");

    const Matrix& tail = trunc.tail.matrix();
    const Matrix tail_block = tail * x.matrix() * tail;

    // X' = sum_n pi_n X pi_n over head cells and the tail cell.
    Matrix xp(m);
    for (const auto& cell : trunc.head) xp += cell.matrix() * x.matrix() * cell.matrix();
    xp += tail_block;

    // X'' = sum_k xi_k sum_{n in I_k} pi_n Pi_k pi_n + tail block.
    Matrix xpp(m);
    MeasurementChain chain{HermitianOperator(Matrix(m)), HermitianOperator(Matrix(m)),
                           HermitianOperator(Matrix(m)), HermitianOperator(Matrix(m)),
                           {}, {}};
    chain.rounded.resize(obs.count());
    Matrix xfin(m);
    for (size_t k = 0; k < obs.count(); ++k) {
        for (int s : assignment.index_sets[k]) {
            const Matrix& pi = trunc.head[static_cast<size_t>(s)].matrix();
            const Matrix p = pi * obs.projections[k].matrix() * pi;
            xpp += cplx(obs.values[k], 0.0) * p;

            const HermitianOperator p_op{p};
            const double gap = operator_norm(p * p - p);
            chain.diag.max_round_gap = std::max(chain.diag.max_round_gap, gap);
            if (gap >= 0.5)
                throw PreconditionViolation(
                    "build_measurement_chain: cell " + std::to_string(s) + " outcome " +
                    std::to_string(k) + " has ||P^2 - P|| = " + std::to_string(gap) +
                    " >= 1/2; rounding is not applicable");
            RoundedProjection rounded = round_to_projection(p_op, 0.5 * (gap + 0.5));
            chain.diag.max_round_dist = std::max(chain.diag.max_round_dist, rounded.distance);

            // The rounded projection must live inside the range of pi_n.
            const Matrix& hat = rounded.projection.matrix();
            if ((pi * hat - hat).frobenius_norm() > proj_tol(m) * 10.0)
                throw PreconditionViolation(
                    "build_measurement_chain: rounded projection escapes its event cell");
            xfin += cplx(obs.values[k], 0.0) * hat;
            chain.rounded[k].push_back(std::move(rounded.projection));
        }
    }
    xpp += tail_block;

    chain.x_prime = HermitianOperator(std::move(xp));
    chain.x_dprime = HermitianOperator(std::move(xpp));
    chain.x_fin = HermitianOperator(xfin);
    chain.x_tprime = HermitianOperator(xfin + tail_block);

    chain.diag.d1 = operator_norm(chain.x_prime.matrix() - x.matrix());
    chain.diag.d2 = operator_norm(chain.x_dprime.matrix() - chain.x_prime.matrix());
    chain.diag.d3 = operator_norm(chain.x_tprime.matrix() - x.matrix());
    for (const auto& cell : trunc.head)
        chain.diag.fin_comms = std::max(
            chain.diag.fin_comms, operator_norm(commutator(chain.x_fin.matrix(), cell.matrix())));
    chain.diag.fin_comms = std::max(
        chain.diag.fin_comms, operator_norm(commutator(chain.x_fin.matrix(), tail)));
    return chain;
}

TheoremReport verify_theorem_31(const DensityMatrix& rho, const MeasurementChain& chain,
                                const TruncatedEvent& trunc, const ObservableSpec& obs,
                                const HermitianOperator& x, double eps, double c3, double tol) {
    const int m = x.dim();
    if (tol < 0.0) tol = 1e-9 * tolerance_scale();

    TheoremReport rep;
    rep.tail_prob = real_trace_product(rho.matrix(), trunc.tail.matrix());
    rep.i_ok = rep.tail_prob <= eps;

    rep.reduction_residual =
        operator_norm(commutator(chain.x_tprime.matrix(), trunc.tail.matrix()));
    rep.ii_ok = rep.reduction_residual <= tol;

    rep.d3 = operator_norm(chain.x_tprime.matrix() - x.matrix());
    rep.d3_threshold = c3 * eps;
    rep.iii_ok = rep.d3 <= rep.d3_threshold;

    // (iv): spectrum of X_fin inside {xi_k} U {0}, eigenprojections matching
    // the rounded family, and commutation with every event cell.
    const EigResult fin = hermitian_eig(chain.x_fin.matrix());
    for (double v : fin.eigenvalues) {
        double best = std::abs(v);
        for (double xi : obs.values) best = std::min(best, std::abs(v - xi));
        rep.spectrum_residual = std::max(rep.spectrum_residual, best);
    }
    // Cluster radius: safely below the separation of the allowed values.
    std::vector<double> allowed = obs.values;
    allowed.push_back(0.0);
    double d_min = std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < allowed.size(); ++a)
        for (size_t b = a + 1; b < allowed.size(); ++b)
            if (allowed[a] != allowed[b])
                d_min = std::min(d_min, std::abs(allowed[a] - allowed[b]));
    const double cluster_tol = std::min(0.25 * d_min, 1e-3);

    for (size_t k = 0; k < obs.count(); ++k) {
        Matrix q(m);
        bool any = false;
        for (const auto& hat : chain.rounded[k]) {
            q += hat.matrix();
            any = true;
        }
        if (!any) continue;
        if (std::abs(obs.values[k]) <= cluster_tol) continue;  // indistinct from the kernel
        std::vector<int> cols;
        for (int i = 0; i < m; ++i)
            if (std::abs(fin.eigenvalues[i] - obs.values[k]) <= cluster_tol) cols.push_back(i);
        Matrix proj(m);
        if (!cols.empty()) proj = OrthoProjection::from_basis_columns(fin.eigenvectors, cols).matrix();
        rep.projection_residual = std::max(rep.projection_residual, operator_norm(proj - q));
    }
    rep.fin_comm_residual = chain.diag.fin_comms;
    rep.iv_ok = rep.spectrum_residual <= tol && rep.projection_residual <= tol &&
                rep.fin_comm_residual <= tol;
    rep.all_ok = rep.i_ok && rep.ii_ok && rep.iii_ok && rep.iv_ok;
    return rep;
}

}  // namespace nearcomm

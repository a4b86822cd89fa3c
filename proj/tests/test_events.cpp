#include <doctest.h>

#include <cmath>
#include <vector>

#include "nearcomm/errors.hpp"
#include "nearcomm/events.hpp"
#include "nearcomm/norms.hpp"
#include "nearcomm/rng.hpp"
#include "oracle.hpp"

using namespace nearcomm;
using oracle::mat;

namespace {

Matrix diag(const std::vector<double>& v) {
    Matrix m(static_cast<int>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = v[i];
    return m;
}

OrthoProjection coord(int dim, std::vector<int> cols) {
    return OrthoProjection::from_basis_columns(Matrix::identity(dim), cols);
}

EventPartition coord_cells(int dim) {
    std::vector<OrthoProjection> cells;
    for (int i = 0; i < dim; ++i) cells.push_back(coord(dim, {i}));
    return EventPartition(std::move(cells));
}

// rotation by theta in the (i, j) coordinate plane
Matrix plane_rotation(int dim, int i, int j, double theta) {
    Matrix r = Matrix::identity(dim);
    r(i, i) = std::cos(theta);
    r(j, j) = std::cos(theta);
    r(i, j) = -std::sin(theta);
    r(j, i) = std::sin(theta);
    return r;
}

}  // namespace

TEST_CASE("event partition validates cells") {
    CHECK_THROWS_AS(EventPartition({coord(2, {0})}), PreconditionViolation);  // incomplete
    CHECK_THROWS_AS(EventPartition({OrthoProjection{HermitianOperator::diagonal({1.0, 1.0, 0.0})},
                                    OrthoProjection{HermitianOperator::diagonal({0.0, 1.0, 0.0})}}),
                    PreconditionViolation);  // overlap
    EventPartition ok = coord_cells(3);
    CHECK(ok.size() == 3);
    CHECK(ok.dim() == 3);
}

TEST_CASE("event partition from a decomposition includes the kernel cell") {
    SpectralDecomposition dec = decompose(DensityMatrix::diagonal({0.5, 0.5, 0.0}));
    EventPartition e = EventPartition::from_decomposition(dec);
    REQUIRE(e.size() == 2);
    CHECK(e.cells()[0].rank() == 2);
    CHECK(e.cells()[1].rank() == 1);

    SpectralDecomposition full = decompose(DensityMatrix::diagonal({0.6, 0.4}));
    CHECK(EventPartition::from_decomposition(full).size() == 2);
}

TEST_CASE("check_actuality vanishes for compatible partitions") {
    DensityMatrix rho = DensityMatrix::diagonal({0.5, 0.3, 0.2});
    CHECK(check_actuality(rho, coord_cells(3)) <= 1e-14);
    CHECK(check_actuality(rho, EventPartition({coord(3, {0, 1, 2})})) <= 1e-14);
}

TEST_CASE("check_actuality measures the lost coherence") {
    DensityMatrix rho{HermitianOperator{mat({{0.5, 0.1}, {0.1, 0.5}})}};
    CHECK(check_actuality(rho, coord_cells(2)) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("coarsening a partition never increases actuality") {
    Rng rng(41);
    Matrix u = random_unitary(rng, 3);
    DensityMatrix rho{HermitianOperator{u * diag({0.5, 0.3, 0.2}) * u.adjoint()}};
    double fine = check_actuality(rho, coord_cells(3));
    double coarse = check_actuality(rho, EventPartition({coord(3, {0, 1}), coord(3, {2})}));
    CHECK(coarse <= fine + 1e-13);
}

TEST_CASE("truncate_tail splits off the lightest cell of the frozen example") {
    DensityMatrix rho = DensityMatrix::diagonal({0.6, 0.3, 0.06, 0.04});
    TruncatedEvent t = truncate_tail(rho, coord_cells(4), 0.05);
    CHECK(t.n0 == 4);
    REQUIRE(t.head.size() == 3);
    CHECK(t.head_weights[0] == doctest::Approx(0.6).epsilon(1e-13));
    CHECK(t.head_weights[1] == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(t.head_weights[2] == doctest::Approx(0.06).epsilon(1e-13));
    CHECK(t.tail_probability == doctest::Approx(0.04).epsilon(1e-13));
    CHECK(t.tail.rank() == 1);
    CHECK(t.tail_probability < 0.05);
}

TEST_CASE("truncate_tail keeps everything when one cell carries all weight") {
    DensityMatrix rho = DensityMatrix::diagonal({1.0, 0.0});
    TruncatedEvent t = truncate_tail(rho, EventPartition({coord(2, {0, 1})}), 0.3);
    CHECK(t.n0 == 2);
    CHECK(t.head.size() == 1);
    CHECK(t.tail.rank() == 0);
    CHECK(t.tail_probability == doctest::Approx(0.0));
}

TEST_CASE("truncate_tail on the uniform state") {
    DensityMatrix rho = DensityMatrix::diagonal({0.25, 0.25, 0.25, 0.25});
    // eps = 1/(2N): the strict prefix rule keeps every cell in the head
    TruncatedEvent t = truncate_tail(rho, coord_cells(4), 0.125);
    CHECK(t.n0 == 5);
    CHECK(t.head.size() == 4);
    CHECK(t.tail.rank() == 0);
    CHECK(t.tail_probability == doctest::Approx(0.0));
    // eps = 3/(2N): one cell falls off the head
    TruncatedEvent t2 = truncate_tail(rho, coord_cells(4), 0.375);
    CHECK(t2.n0 == 4);
    CHECK(t2.head.size() == 3);
    CHECK(t2.tail_probability == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(t2.tail_probability < 0.375);
}

TEST_CASE("truncate_tail rejects eps outside the open unit interval") {
    DensityMatrix rho = DensityMatrix::diagonal({0.6, 0.4});
    CHECK_THROWS_AS(truncate_tail(rho, coord_cells(2), 0.0), PreconditionViolation);
    CHECK_THROWS_AS(truncate_tail(rho, coord_cells(2), 1.0), PreconditionViolation);
}

TEST_CASE("assign_index_sets maps aligned cells to their outcomes") {
    DensityMatrix rho = DensityMatrix::diagonal({0.5, 0.3, 0.2});
    TruncatedEvent t = truncate_tail(rho, coord_cells(3), 0.1);
    REQUIRE(t.head.size() == 3);
    ObservableSpec obs = observable_spec(HermitianOperator::diagonal({1.0, 1.0, -1.0}));
    IndexAssignment a = assign_index_sets(t, obs, 0.1);
    REQUIRE(a.index_sets.size() == 2);
    CHECK(a.index_sets[0] == std::vector<int>{0, 1});
    CHECK(a.index_sets[1] == std::vector<int>{2});
    CHECK(a.max_comm <= 1e-14);
    CHECK(a.leakage[0] <= 1e-14);
    CHECK(a.leakage[1] <= 1e-14);
    CHECK(a.comm_ok);
    CHECK(a.leakage_ok);
}

TEST_CASE("assign_index_sets breaks ties toward the smaller outcome") {
    DensityMatrix rho = DensityMatrix::diagonal({0.5, 0.5});
    TruncatedEvent t = truncate_tail(rho, coord_cells(2), 0.3);
    // flip observable: both coordinate cells overlap each outcome with 1/2
    ObservableSpec obs = observable_spec(HermitianOperator{mat({{0.0, 1.0}, {1.0, 0.0}})});
    IndexAssignment a = assign_index_sets(t, obs, 0.3);
    CHECK(a.index_sets[0].size() == t.head.size());
    CHECK(a.index_sets[1].empty());
}

TEST_CASE("assign_index_sets reports leakage of a skewed pair") {
    DensityMatrix rho = DensityMatrix::diagonal({0.9, 0.1});
    TruncatedEvent t = truncate_tail(rho, coord_cells(2), 0.05);
    REQUIRE(t.head.size() == 2);
    // outcome +1 along (sqrt(0.7), sqrt(0.3)), outcome -1 orthogonal
    const double c = std::sqrt(0.7), s = std::sqrt(0.3);
    Matrix proj = mat({{c * c, c * s}, {c * s, s * s}});
    Matrix x = cplx(2.0, 0.0) * proj - Matrix::identity(2);
    ObservableSpec obs = observable_spec(HermitianOperator{x});
    IndexAssignment a = assign_index_sets(t, obs, 0.5);
    CHECK(a.index_sets[0] == std::vector<int>{0});
    CHECK(a.index_sets[1] == std::vector<int>{1});
    CHECK(a.leakage[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(a.leakage[1] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(a.max_comm == doctest::Approx(std::sqrt(0.21)).epsilon(1e-10));
    CHECK_FALSE(a.comm_ok);  // 0.458 is nowhere near eps / n0^2
    CHECK(a.leakage_ok);     // 0.3 < 0.5
    IndexAssignment tight = assign_index_sets(t, obs, 0.2);
    CHECK_FALSE(tight.leakage_ok);  // 0.3 > 0.2
}

TEST_CASE("measurement chain is the identity on an exactly commuting setup") {
    DensityMatrix rho = DensityMatrix::diagonal({0.5, 0.3, 0.2});
    HermitianOperator x = HermitianOperator::diagonal({2.0, 1.0, 1.0});
    TruncatedEvent t = truncate_tail(rho, coord_cells(3), 0.1);
    ObservableSpec obs = observable_spec(x);
    IndexAssignment a = assign_index_sets(t, obs, 0.1);
    MeasurementChain chain = build_measurement_chain(x, t, obs, a);

    CHECK((chain.x_prime.matrix() - x.matrix()).max_abs() <= 1e-13);
    CHECK((chain.x_dprime.matrix() - x.matrix()).max_abs() <= 1e-13);
    CHECK((chain.x_tprime.matrix() - x.matrix()).max_abs() <= 1e-13);
    CHECK((chain.x_fin.matrix() - x.matrix()).max_abs() <= 1e-13);
    CHECK(chain.diag.d1 <= 1e-13);
    CHECK(chain.diag.d2 <= 1e-13);
    CHECK(chain.diag.d3 <= 1e-13);
    CHECK(chain.diag.fin_comms <= 1e-13);
    CHECK(chain.diag.max_round_dist <= 1e-13);

    TheoremReport rep = verify_theorem_31(rho, chain, t, obs, x, 0.1);
    CHECK(rep.i_ok);
    CHECK(rep.ii_ok);
    CHECK(rep.iii_ok);
    CHECK(rep.iv_ok);
    CHECK(rep.all_ok);
    CHECK(rep.tail_prob <= 1e-14);
    CHECK(rep.d3 <= 1e-13);
    CHECK(rep.spectrum_residual <= 1e-13);
    CHECK(rep.projection_residual <= 1e-13);
}

TEST_CASE("measurement chain tracks a small rotation of the event cells") {
    const double theta = 0.01;
    const int m = 3;
    HermitianOperator x = HermitianOperator::diagonal({1.0, 1.0, -1.0});
    Matrix r = plane_rotation(m, 0, 2, theta);
    std::vector<OrthoProjection> cells;
    for (int i = 0; i < m; ++i) cells.push_back(OrthoProjection::from_basis_columns(r, {i}));
    EventPartition e{std::move(cells)};
    Matrix rho_m = r * diag({0.5, 0.3, 0.2}) * r.adjoint();
    DensityMatrix rho{HermitianOperator{rho_m}};

    TruncatedEvent t = truncate_tail(rho, e, 0.1);
    REQUIRE(t.head.size() == 3);
    ObservableSpec obs = observable_spec(x);
    IndexAssignment a = assign_index_sets(t, obs, 0.1);
    REQUIRE(a.index_sets[0].size() + a.index_sets[1].size() == 3);
    MeasurementChain chain = build_measurement_chain(x, t, obs, a);

    // the chain moves X by O(theta) and lands on an exact observable
    CHECK(chain.diag.d3 > 1e-4);
    CHECK(chain.diag.d3 <= 5.0 * theta);
    CHECK(chain.diag.max_round_gap <= theta * theta * 1.1);
    CHECK(chain.diag.fin_comms <= 1e-10 * m);

    // rounded projections stay inside their event cells
    for (size_t k = 0; k < a.index_sets.size(); ++k)
        for (size_t i = 0; i < a.index_sets[k].size(); ++i) {
            const Matrix& pi = t.head[static_cast<size_t>(a.index_sets[k][i])].matrix();
            const Matrix& hat = chain.rounded[k][i].matrix();
            CHECK((pi * hat - hat).max_abs() <= 1e-10 * m);
        }

    TheoremReport rep = verify_theorem_31(rho, chain, t, obs, x, 0.1);
    CHECK(rep.i_ok);
    CHECK(rep.ii_ok);
    CHECK(rep.spectrum_residual <= 1e-9);
    CHECK(rep.projection_residual <= 1e-9);
    CHECK(rep.fin_comm_residual <= 1e-9);
    CHECK(rep.iv_ok);
}

TEST_CASE("measurement chain with a tail keeps the discarded block explicit") {
    DensityMatrix rho = DensityMatrix::diagonal({0.6, 0.3, 0.06, 0.04});
    HermitianOperator x = HermitianOperator::diagonal({2.0, 1.0, 1.0, -1.0});
    TruncatedEvent t = truncate_tail(rho, coord_cells(4), 0.05);
    REQUIRE(t.tail.rank() == 1);
    ObservableSpec obs = observable_spec(x);
    IndexAssignment a = assign_index_sets(t, obs, 0.05);
    MeasurementChain chain = build_measurement_chain(x, t, obs, a);

    // X''' - X_fin is exactly the tail block of X
    Matrix tail_block = t.tail.matrix() * x.matrix() * t.tail.matrix();
    CHECK((chain.x_tprime.matrix() - chain.x_fin.matrix() - tail_block).max_abs() <= 1e-14);
    // here everything is diagonal: the chain returns X itself
    CHECK((chain.x_tprime.matrix() - x.matrix()).max_abs() <= 1e-13);

    TheoremReport rep = verify_theorem_31(rho, chain, t, obs, x, 0.05);
    CHECK(rep.tail_prob == doctest::Approx(0.04).epsilon(1e-13));
    CHECK(rep.all_ok);

    // a tighter verification eps fails the tail weight clause
    TheoremReport tight = verify_theorem_31(rho, chain, t, obs, x, 0.01);
    CHECK_FALSE(tight.i_ok);
    CHECK_FALSE(tight.all_ok);
}

TEST_CASE("theorem verification flags a structurally incompatible pair") {
    DensityMatrix rho = DensityMatrix::diagonal({0.9, 0.1});
    TruncatedEvent t = truncate_tail(rho, coord_cells(2), 0.05);
    const double c = std::sqrt(0.7), s = std::sqrt(0.3);
    Matrix proj = mat({{c * c, c * s}, {c * s, s * s}});
    Matrix xm = cplx(2.0, 0.0) * proj - Matrix::identity(2);
    HermitianOperator x{xm};
    ObservableSpec obs = observable_spec(x);
    IndexAssignment a = assign_index_sets(t, obs, 0.05);
    MeasurementChain chain = build_measurement_chain(x, t, obs, a);
    TheoremReport rep = verify_theorem_31(rho, chain, t, obs, x, 0.05);
    CHECK(rep.d3 > 1.0);  // the chain tore X apart
    CHECK_FALSE(rep.iii_ok);
    CHECK_FALSE(rep.all_ok);
}

TEST_CASE("final observable spectrum stays inside the outcome set") {
    Rng rng(55);
    for (int rep_i = 0; rep_i < 5; ++rep_i) {
        const int m = 4;
        const double theta = 0.02;
        Matrix r = plane_rotation(m, 1, 3, theta);
        std::vector<OrthoProjection> cells;
        for (int i = 0; i < m; ++i) cells.push_back(OrthoProjection::from_basis_columns(r, {i}));
        EventPartition e{std::move(cells)};
        Matrix rho_m = r * diag({0.4, 0.3, 0.2, 0.1}) * r.adjoint();
        DensityMatrix rho{HermitianOperator{rho_m}};
        HermitianOperator x = HermitianOperator::diagonal({2.0, 1.0, 1.0, -1.0});
        TruncatedEvent t = truncate_tail(rho, e, 0.2);
        ObservableSpec obs = observable_spec(x);
        IndexAssignment a = assign_index_sets(t, obs, 0.2);
        MeasurementChain chain = build_measurement_chain(x, t, obs, a);

        EigResult fin = hermitian_eig(chain.x_fin.matrix());
        for (double v : fin.eigenvalues) {
            double best = std::abs(v);
            for (double xi : obs.values) best = std::min(best, std::abs(v - xi));
            CHECK(best <= 1e-9);
        }
        for (const auto& cell : t.head)
            CHECK(operator_norm(commutator(chain.x_fin.matrix(), cell.matrix())) <= 1e-10 * m);
    }
}

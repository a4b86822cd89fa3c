#include <doctest.h>

#include <cmath>
#include <vector>

#include "nearcomm/approx.hpp"
#include "nearcomm/errors.hpp"
#include "nearcomm/generators.hpp"
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

BinningParams params_for(double eps) {
    BinningParams p;
    p.eps = eps;
    return p;
}

}  // namespace

TEST_CASE("binning parameters validate the exponent window") {
    CHECK_NOTHROW(params_for(1e-4).validate());
    BinningParams bad = params_for(1e-4);
    bad.beta_exp = 0.5;  // exactly 2*delta is rejected
    CHECK_THROWS_AS(bad.validate(), PreconditionViolation);
    bad = params_for(1e-4);
    bad.delta_exp = 0.8;  // delta above beta
    CHECK_THROWS_AS(bad.validate(), PreconditionViolation);
    bad = params_for(-1.0);
    CHECK_THROWS_AS(bad.validate(), PreconditionViolation);
    bad = params_for(1e-4);
    bad.beta_exp = 1.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionViolation);
}

TEST_CASE("gap_binning sends the light eigenvalue of a 2x2 state to the zero bin") {
    SpectralDecomposition dec = decompose(DensityMatrix::diagonal({0.75, 0.25}));
    GapBinning bins = gap_binning(dec, params_for(0.1));
    // eps^{1/4} = 0.56: only 0.75 clears the entry threshold
    REQUIRE(bins.bin_count() == 1);
    REQUIRE(bins.zero_bin.size() == 1);
    CHECK(bins.asc_eigenvalues[bins.zero_bin[0]] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(bins.bins[0].representative == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(bins.zero_bin_hi == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(bins.precursors[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(bins.head_count() == 1);
}

TEST_CASE("gap_binning keeps well-separated eigenvalues in singleton bins") {
    SpectralDecomposition dec = decompose(DensityMatrix::diagonal({0.6, 0.4}));
    GapBinning bins = gap_binning(dec, params_for(1e-8));
    REQUIRE(bins.bin_count() == 2);
    CHECK(bins.zero_bin.empty());
    CHECK(bins.bins[0].representative == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(bins.bins[1].representative == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(bins.bins[0].members_asc.size() == 1);
    CHECK(bins.bins[1].members_asc.size() == 1);
}

TEST_CASE("gap_binning chains a near-degenerate pair into one bin") {
    const double g = 1e-7;
    SpectralDecomposition dec = decompose(DensityMatrix::diagonal({0.5 + g, 0.5 - g}));
    GapBinning bins = gap_binning(dec, params_for(1e-8));  // eps^{3/4} = 1e-6 > 2g
    REQUIRE(bins.bin_count() == 1);
    CHECK(bins.bins[0].members_asc.size() == 2);
    // representative is the smallest member
    CHECK(bins.bins[0].representative == doctest::Approx(0.5 - g).epsilon(1e-12));
    CHECK(bins.zero_bin.empty());
}

TEST_CASE("gap_binning mean variant represents bins by their member mean") {
    SpectralDecomposition dec = decompose(DensityMatrix::diagonal({0.337, 0.333, 0.33}));
    BinningParams p = params_for(1e-2);  // eps^{3/4} = 0.0316 chains all three
    p.mean_representative = true;
    GapBinning bins = gap_binning(dec, p);
    REQUIRE(bins.bin_count() == 1);
    CHECK(bins.bins[0].representative == doctest::Approx((0.337 + 0.333 + 0.33) / 3.0).epsilon(1e-12));

    p.mean_representative = false;
    GapBinning def = gap_binning(dec, p);
    CHECK(def.bins[0].representative == doctest::Approx(0.33).epsilon(1e-12));
}

TEST_CASE("gap_binning bin count never drops as beta_exp grows") {
    // finer gap threshold (larger beta) can only split bins further
    SpectralDecomposition dec =
        decompose(DensityMatrix::diagonal({0.256, 0.254, 0.252, 0.238}));
    BinningParams coarse = params_for(1e-4);
    coarse.beta_exp = 0.55;
    BinningParams fine = params_for(1e-4);
    fine.beta_exp = 0.75;
    GapBinning a = gap_binning(dec, coarse);
    GapBinning b = gap_binning(dec, fine);
    CHECK(a.bin_count() == 2);
    CHECK(b.bin_count() == 4);

    Rng rng(515);
    for (int rep = 0; rep < 20; ++rep) {
        int m = rng.uniform_int(2, 8);
        std::vector<double> spec(m);
        double sum = 0.0;
        for (double& s : spec) sum += (s = rng.uniform_open());
        for (double& s : spec) s /= sum;
        SpectralDecomposition d = decompose(DensityMatrix{HermitianOperator{diag(spec)}});
        int prev = -1;
        for (double beta : {0.55, 0.65, 0.75, 0.85, 0.95}) {
            BinningParams p = params_for(1e-5);
            p.beta_exp = beta;
            int count = gap_binning(d, p).bin_count();
            if (prev >= 0) CHECK(count >= prev);
            prev = count;
        }
    }
}

TEST_CASE("flatten_state loses exactly the zero bin and flattening mass") {
    SpectralDecomposition dec = decompose(DensityMatrix::diagonal({0.75, 0.25}));
    GapBinning bins = gap_binning(dec, params_for(0.1));
    FlattenedState flat = flatten_state(dec, bins);
    CHECK((flat.omega_tilde.matrix() - diag({0.75, 0.0})).max_abs() <= 1e-13);
    CHECK(flat.zero_bin_loss == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(flat.flatten_loss == doctest::Approx(0.0));
    CHECK(flat.trace_loss == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("flatten_state with singleton bins is lossless") {
    SpectralDecomposition dec = decompose(DensityMatrix::diagonal({0.6, 0.4}));
    GapBinning bins = gap_binning(dec, params_for(1e-8));
    FlattenedState flat = flatten_state(dec, bins);
    CHECK((flat.omega_tilde.matrix() - diag({0.6, 0.4})).max_abs() <= 1e-13);
    CHECK(flat.trace_loss <= 1e-14);
}

TEST_CASE("flatten_state pulls a chained bin down to its minimum") {
    const double g = 1e-7;
    SpectralDecomposition dec = decompose(DensityMatrix::diagonal({0.5 + g, 0.5 - g}));
    GapBinning bins = gap_binning(dec, params_for(1e-8));
    FlattenedState flat = flatten_state(dec, bins);
    CHECK((flat.omega_tilde.matrix() - diag({0.5 - g, 0.5 - g})).max_abs() <= 1e-14);
    CHECK(flat.flatten_loss == doctest::Approx(2.0 * g).epsilon(1e-6));
    CHECK(flat.zero_bin_loss == 0.0);
}

TEST_CASE("block_compress pinches the observable to the bin blocks") {
    SpectralDecomposition dec = decompose(DensityMatrix::diagonal({0.75, 0.25}));
    GapBinning bins = gap_binning(dec, params_for(0.1));
    CompressedObservable comp =
        block_compress(HermitianOperator{mat({{0.0, 0.2}, {0.2, 0.0}})}, dec, bins);
    // zero bin and head bin are different blocks: the coupling dies
    CHECK(comp.x_prime.matrix().max_abs() <= 1e-14);
    CHECK(comp.rowsum_max == doctest::Approx(0.04).epsilon(1e-12));  // 0.2^2
}

TEST_CASE("commuting_approximants reproduces the exact 2x2 walkthrough") {
    DensityMatrix rho = DensityMatrix::diagonal({0.75, 0.25});
    HermitianOperator x{mat({{0.0, 0.2}, {0.2, 0.0}})};
    CommutingApproximant out = commuting_approximants(rho, x, params_for(0.1));

    CHECK((out.rho_prime.matrix() - diag({1.0, 0.0})).max_abs() <= 1e-12);
    CHECK(out.x_prime.matrix().max_abs() <= 1e-12);
    CHECK(out.cert.dX == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(out.cert.dOmega == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out.cert.delta_eps == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(out.cert.residual <= 1e-12);
    CHECK(out.cert.bound_dX == doctest::Approx(std::pow(0.1, 0.25)).epsilon(1e-12));
    CHECK(out.cert.bound_dOmega ==
          doctest::Approx(0.5 + 2.0 * std::pow(0.1, 0.25)).epsilon(1e-12));
    CHECK(out.cert.pass_dX());
    CHECK(out.cert.pass_dOmega());
    CHECK(out.cert.scale_factor == 1.0);
    CHECK(out.cert.eps_measured == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("commuting_approximants eps zero passthrough") {
    DensityMatrix rho = DensityMatrix::diagonal({0.7, 0.3});
    HermitianOperator x = HermitianOperator::diagonal({1.0, -1.0});
    CommutingApproximant out = commuting_approximants(rho, x, params_for(0.0));
    CHECK((out.rho_prime.matrix() - rho.matrix()).max_abs() == 0.0);
    CHECK((out.x_prime.matrix() - x.matrix()).max_abs() == 0.0);
    CHECK(out.cert.residual <= 1e-14);

    HermitianOperator bad{mat({{0.0, 0.2}, {0.2, 0.0}})};
    CHECK_THROWS_AS(commuting_approximants(rho, bad, params_for(0.0)), PreconditionViolation);
}

TEST_CASE("commuting_approximants rejects a commutator above eps") {
    DensityMatrix rho = DensityMatrix::diagonal({0.75, 0.25});
    HermitianOperator x{mat({{0.0, 0.2}, {0.2, 0.0}})};  // commutator norm 0.1
    CHECK_THROWS_AS(commuting_approximants(rho, x, params_for(0.01)), PreconditionViolation);
}

TEST_CASE("commuting_approximants is near-identity on a separated commuting pair") {
    DensityMatrix rho = DensityMatrix::diagonal({0.7, 0.3});
    HermitianOperator x = HermitianOperator::diagonal({0.5, -0.5});
    CommutingApproximant out = commuting_approximants(rho, x, params_for(1e-6));
    CHECK(out.cert.dX <= 1e-13);
    CHECK(out.cert.dOmega <= 1e-13);
    CHECK(out.cert.residual <= 1e-14);
}

TEST_CASE("commuting_approximants records the rescale of a large observable") {
    DensityMatrix rho = DensityMatrix::diagonal({0.75, 0.25});
    HermitianOperator x{mat({{3.0, 1e-4}, {1e-4, -3.0}})};
    CommutingApproximant out = commuting_approximants(rho, x, params_for(1e-4));
    CHECK(out.cert.scale_factor == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(out.cert.bound_dX ==
          doctest::Approx(out.cert.scale_factor * std::pow(1e-4, 0.25)).epsilon(1e-12));
    // the emitted observable is back on the input scale
    CHECK(out.x_prime.matrix()(0, 0).real() == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(out.cert.dX == doctest::Approx(1e-4).epsilon(1e-6));
    CHECK(out.cert.pass_dX());
}

TEST_CASE("commuting_approximants rejects a state with no surviving mass") {
    // uniform spectrum sits below eps^{1/4} for M = 16, eps = 1e-2
    std::vector<double> spec(16, 1.0 / 16.0);
    DensityMatrix rho = DensityMatrix::diagonal(spec);
    Rng rng(9);
    Matrix x0 = random_hermitian(rng, 16);
    x0 *= cplx(1.0 / operator_norm(x0), 0.0);
    CHECK_THROWS_WITH_AS(commuting_approximants(rho, HermitianOperator{x0}, params_for(1e-2)),
                         doctest::Contains("below the eps^delta threshold"),
                         PreconditionViolation);
}

TEST_CASE("commuting approximants satisfy their certificate on generated instances") {
    for (RecipeKind kind : {RecipeKind::perturbed_commuting, RecipeKind::clustered_spectrum,
                            RecipeKind::adversarial_gap}) {
        for (double eps : {1e-3, 1e-5}) {
            InstanceRecipe recipe;
            recipe.kind = kind;
            recipe.dim = 6;
            recipe.eps_target = eps;
            recipe.seed = 1234;
            Instance inst = gen_instance(recipe);
            CommutingApproximant out =
                commuting_approximants(inst.rho, inst.x, params_for(eps));
            CHECK(out.cert.pass_dX());
            CHECK(out.cert.pass_dOmega());
            CHECK(out.cert.residual <= 1e-10 * 6);
            // the flattened state only loses mass: omega_tilde <= rho pointwise
            // in the shared eigenbasis, so rho' stays a valid state
            EigResult e = hermitian_eig(out.rho_prime.matrix());
            for (double v : e.eigenvalues) CHECK(v >= -1e-12);
            CHECK(out.rho_prime.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("head eigenvalue count stays below the mass budget") {
    Rng rng(77);
    for (int rep = 0; rep < 10; ++rep) {
        int m = rng.uniform_int(4, 12);
        std::vector<double> spec(m);
        double sum = 0.0;
        for (double& s : spec) sum += (s = rng.uniform_open());
        for (double& s : spec) s /= sum;
        SpectralDecomposition dec = decompose(DensityMatrix{HermitianOperator{diag(spec)}});
        BinningParams p = params_for(1e-6);
        GapBinning bins = gap_binning(dec, p);
        // every head member carries at least eps^delta of mass
        CHECK(bins.head_count() <= static_cast<int>(1.0 / bins.eps_delta) + 1);
    }
}

TEST_CASE("certificate norms agree with closed-form recomputation at dims 2 and 3") {
    for (int dim : {2, 3}) {
        for (uint64_t seed : {11ull, 12ull, 13ull}) {
            InstanceRecipe recipe;
            recipe.kind = RecipeKind::perturbed_commuting;
            recipe.dim = dim;
            recipe.eps_target = 1e-4;
            recipe.seed = seed;
            Instance inst = gen_instance(recipe);
            CommutingApproximant out =
                commuting_approximants(inst.rho, inst.x, params_for(1e-4));

            double dx = oracle::op_norm(inst.x.matrix() - out.x_prime.matrix());
            double domega = oracle::tr_norm(inst.rho.matrix() - out.rho_prime.matrix());
            double res = oracle::op_norm(commutator(out.rho_prime.matrix(), out.x_prime.matrix()));
            double eps_meas = oracle::op_norm(commutator(inst.rho.matrix(), inst.x.matrix()));
            CHECK(std::abs(out.cert.dX - dx) <= 1e-9);
            CHECK(std::abs(out.cert.dOmega - domega) <= 1e-9);
            CHECK(std::abs(out.cert.residual - res) <= 1e-9);
            CHECK(std::abs(out.cert.eps_measured - eps_meas) <= 1e-9);
        }
    }
}

TEST_CASE("mean variant halves the flattening loss of a symmetric bin") {
    SpectralDecomposition dec = decompose(DensityMatrix::diagonal({0.337, 0.333, 0.33}));
    BinningParams p = params_for(1e-2);
    GapBinning min_bins = gap_binning(dec, p);
    p.mean_representative = true;
    GapBinning mean_bins = gap_binning(dec, p);
    FlattenedState f_min = flatten_state(dec, min_bins);
    FlattenedState f_mean = flatten_state(dec, mean_bins);
    CHECK(f_mean.flatten_loss < f_min.flatten_loss);
    // mean keeps the trace of each bin: total trace is preserved
    CHECK(f_mean.omega_tilde.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
}

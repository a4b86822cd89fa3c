// command line front end: generate instances, build commuting replacements,
// pinch against a reference, run event interpretation, sweep, verify
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nearcomm/approx.hpp"
#include "nearcomm/errors.hpp"
#include "nearcomm/events.hpp"
#include "nearcomm/generators.hpp"
#include "nearcomm/io.hpp"
#include "nearcomm/norms.hpp"
#include "nearcomm/postulate.hpp"
#include "nearcomm/sweep.hpp"

using nlohmann::json;
using namespace nearcomm;

namespace {

// 0 ok, 1 bound or verdict failure, 2 malformed input or precondition, 3 numeric failure
constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitNumeric = 3;

DensityMatrix load_density(const std::string& path) {
    try {
        return DensityMatrix(HermitianOperator(read_matrix_file(path)));
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(path + ": not a density matrix: " + e.what());
    }
}

HermitianOperator load_hermitian(const std::string& path) {
    try {
        return HermitianOperator(read_matrix_file(path));
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(path + ": not Hermitian: " + e.what());
    }
}

int cmd_gen(const InstanceRecipe& recipe, const std::string& out_omega,
            const std::string& out_x) {
    Instance inst = gen_instance(recipe);
    write_matrix_file(out_omega, inst.rho.matrix());
    write_matrix_file(out_x, inst.x.matrix());
    json j{{"kind", to_string(recipe.kind)},
           {"dim", recipe.dim},
           {"seed", recipe.seed},
           {"eps_target", recipe.eps_target},
           {"eps_measured", inst.eps_measured}};
    std::printf("%s\n", j.dump(2).c_str());
    return kExitOk;
}

int cmd_approx(const std::string& omega_path, const std::string& x_path, double eps,
               BinningParams params, bool mean_rep, const std::string& out_omega,
               const std::string& out_x, const std::string& out_cert) {
    params.mean_representative = mean_rep;
    DensityMatrix rho = load_density(omega_path);
    HermitianOperator x = load_hermitian(x_path);
    if (eps < 0.0) eps = operator_norm(commutator(rho.matrix(), x.matrix()));
    params.eps = eps;
    CommutingApproximant ca = commuting_approximants(rho, x, params);
    if (!out_omega.empty()) write_matrix_file(out_omega, ca.rho_prime.matrix());
    if (!out_x.empty()) write_matrix_file(out_x, ca.x_prime.matrix());
    std::string cert = certificate_to_json(ca.cert);
    if (!out_cert.empty()) write_text_file(out_cert, cert);
    std::printf("%s", cert.c_str());
    if (!ca.cert.pass_dX()) {
        std::printf("VIOLATION: dX = %.17g > bound_dX = %.17g\n", ca.cert.dX, ca.cert.bound_dX);
        return kExitViolation;
    }
    if (!ca.cert.pass_dOmega()) {
        std::printf("VIOLATION: dOmega = %.17g > bound_dOmega = %.17g\n", ca.cert.dOmega,
                    ca.cert.bound_dOmega);
        return kExitViolation;
    }
    return kExitOk;
}

int cmd_pinch(const std::string& omega_path, const std::string& x_path, bool state_mode,
              const std::string& out_path) {
    DensityMatrix rho = load_density(omega_path);
    HermitianOperator x = load_hermitian(x_path);
    json j;
    bool ok = true;
    if (state_mode) {
        PinchedState ps = pinch_state(rho, x);
        if (!out_path.empty()) write_matrix_file(out_path, ps.rho_prime.matrix());
        j = json{{"mode", "state"},
                 {"eps", ps.cert.eps},
                 {"gap", ps.cert.gap},
                 {"dim", ps.cert.dim},
                 {"claimed_bound", ps.cert.claimed_bound},
                 {"block_count_bound", ps.cert.block_count_bound},
                 {"achieved", ps.cert.achieved},
                 {"residual", ps.cert.residual},
                 {"born_discrepancy", ps.born_discrepancy}};
        ok = ps.cert.achieved <= ps.cert.claimed_bound;
    } else {
        PinchedObservable po = pinch_observable(x, rho);
        if (!out_path.empty()) write_matrix_file(out_path, po.x_prime.matrix());
        j = json{{"mode", "observable"},
                 {"eps", po.cert.eps},
                 {"gap", po.cert.gap},
                 {"dim", po.cert.dim},
                 {"claimed_bound", po.cert.claimed_bound},
                 {"block_count_bound", po.cert.block_count_bound},
                 {"achieved", po.cert.achieved},
                 {"residual", po.cert.residual}};
        ok = po.cert.achieved <= po.cert.claimed_bound;
    }
    std::printf("%s\n", j.dump(2).c_str());
    if (!ok) {
        std::printf("VIOLATION: achieved distance exceeds the certified bound\n");
        return kExitViolation;
    }
    return kExitOk;
}

int cmd_event(const std::string& omega_path, const std::string& x_path, double eps, double c1,
              double c2, double c3, const std::string& out_fin) {
    DensityMatrix rho = load_density(omega_path);
    HermitianOperator x = load_hermitian(x_path);
    if (eps <= 0.0) throw PreconditionViolation("event: --eps must be positive");

    SpectralDecomposition dec = decompose(rho);
    EventPartition part = EventPartition::from_decomposition(dec);
    ObservableSpec obs = observable_spec(x);
    TruncatedEvent trunc = truncate_tail(rho, part, eps);
    IndexAssignment assign = assign_index_sets(trunc, obs, eps, c1, c2);
    MeasurementChain chain = build_measurement_chain(x, trunc, obs, assign);
    TheoremReport rep = verify_theorem_31(rho, chain, trunc, obs, x, eps, c3);
    if (!out_fin.empty()) write_matrix_file(out_fin, chain.x_fin.matrix());

    json sets = json::array();
    for (const auto& s : assign.index_sets) sets.push_back(s);
    json j{{"eps", eps},
           {"n0", trunc.n0},
           {"tail_probability", trunc.tail_probability},
           {"index_sets", sets},
           {"max_comm", assign.max_comm},
           {"comm_ok", assign.comm_ok},
           {"leakage_ok", assign.leakage_ok},
           {"d1", chain.diag.d1},
           {"d2", chain.diag.d2},
           {"d3", chain.diag.d3},
           {"max_round_dist", chain.diag.max_round_dist},
           {"theorem",
            json{{"tail_ok", rep.i_ok},
                 {"reduction_ok", rep.ii_ok},
                 {"distance_ok", rep.iii_ok},
                 {"spectrum_ok", rep.iv_ok},
                 {"all_ok", rep.all_ok}}}};
    std::printf("%s\n", j.dump(2).c_str());
    if (!rep.all_ok) {
        if (!rep.i_ok)
            std::printf("VIOLATION: tail probability %.17g > eps = %.17g\n", rep.tail_prob, eps);
        if (!rep.ii_ok)
            std::printf("VIOLATION: tail reduction residual %.17g\n", rep.reduction_residual);
        if (!rep.iii_ok)
            std::printf("VIOLATION: d3 = %.17g > %.17g\n", rep.d3, rep.d3_threshold);
        if (!rep.iv_ok)
            std::printf("VIOLATION: spectrum residual %.17g, projection residual %.17g\n",
                        rep.spectrum_residual, rep.projection_residual);
        return kExitViolation;
    }
    return kExitOk;
}

int cmd_sweep(const std::vector<int>& dims, const std::vector<double>& eps_grid,
              const std::vector<std::string>& kinds, int instances, uint64_t seed_base,
              double delta_exp, double beta_exp, bool timing, const std::string& out_csv) {
    std::vector<SweepCase> cases;
    for (const std::string& kname : kinds) {
        RecipeKind kind = recipe_kind_from_string(kname);
        for (int dim : dims)
            for (double eps : eps_grid)
                for (int i = 0; i < instances; ++i) {
                    SweepCase c;
                    c.recipe = InstanceRecipe{kind, dim, eps, seed_base + (uint64_t)i, {}};
                    c.params = BinningParams{eps, delta_exp, beta_exp};
                    cases.push_back(c);  // bad params become captured row errors
                }
    }
    SweepResult res = run_sweep(cases, timing);
    std::string csv = sweep_to_csv(res);
    if (!out_csv.empty())
        write_text_file(out_csv, csv);
    else
        std::printf("%s", csv.c_str());
    const SweepSummary& s = res.summary;
    std::fprintf(stderr,
                 "rows=%d failed=%d violations_dX=%d violations_dOmega=%d "
                 "max_ratio_dX=%.6g max_ratio_dOmega=%.6g slope_dX=%.6g (%d eps points)\n",
                 s.total, s.failed, s.violations_dx, s.violations_domega, s.max_ratio_dx,
                 s.max_ratio_domega, s.slope_dx, s.slope_points);
    if (s.violations_dx > 0 || s.violations_domega > 0) {
        std::printf("VIOLATION: %d dX and %d dOmega rows exceed their certified bounds\n",
                    s.violations_dx, s.violations_domega);
        return kExitViolation;
    }
    return s.failed == 0 ? kExitOk : kExitNumeric;
}

int cmd_verify(const std::string& omega_path, const std::string& x_path,
               const std::string& omega_p_path, const std::string& x_p_path,
               const std::string& cert_path) {
    DensityMatrix rho = load_density(omega_path);
    HermitianOperator x = load_hermitian(x_path);
    DensityMatrix rho_p = load_density(omega_p_path);
    HermitianOperator x_p = load_hermitian(x_p_path);
    ApproxCertificate cert;
    try {
        cert = certificate_from_json(read_text_file(cert_path));
    } catch (const ParseError& e) {
        throw ParseError(cert_path + ": " + e.what());
    }

    double eps_meas = operator_norm(commutator(rho.matrix(), x.matrix()));
    double residual = operator_norm(commutator(rho_p.matrix(), x_p.matrix()));
    double dx = operator_norm(x.matrix() - x_p.matrix());
    double domega = trace_norm(rho.matrix() - rho_p.matrix());
    double delta_eps = tail_weight(decompose(rho), cert.eps);

    json j{{"eps", cert.eps},           {"eps_measured", eps_meas},
           {"residual", residual},      {"dX", dx},
           {"bound_dX", cert.bound_dX}, {"dOmega", domega},
           {"bound_dOmega", cert.bound_dOmega}, {"delta_eps", delta_eps}};
    std::printf("%s\n", j.dump(2).c_str());

    int rc = kExitOk;
    double resid_tol = 1e-10 * rho.matrix().dim() * tolerance_scale();
    if (eps_meas > cert.eps * (1.0 + 1e-9)) {
        std::printf("VIOLATION: measured commutator %.17g > certified eps = %.17g\n", eps_meas,
                    cert.eps);
        rc = kExitViolation;
    }
    if (residual > resid_tol) {
        std::printf("VIOLATION: replacement pair residual %.17g > %.17g, pair does not commute\n",
                    residual, resid_tol);
        rc = kExitViolation;
    }
    if (dx > cert.bound_dX) {
        std::printf("VIOLATION: dX = %.17g > bound_dX = %.17g\n", dx, cert.bound_dX);
        rc = kExitViolation;
    }
    if (domega > cert.bound_dOmega) {
        std::printf("VIOLATION: dOmega = %.17g > bound_dOmega = %.17g\n", domega,
                    cert.bound_dOmega);
        rc = kExitViolation;
    }
    // certificate fields must match recomputation from the matrices
    auto mismatch = [&](const char* name, double recorded, double recomputed, double rel) {
        if (std::abs(recorded - recomputed) > rel * (1.0 + std::abs(recomputed))) {
            std::printf("MISMATCH: certificate %s = %.17g, recomputed %.17g\n", name, recorded,
                        recomputed);
            rc = kExitViolation;
        }
    };
    mismatch("dX", cert.dX, dx, 1e-8);
    mismatch("dOmega", cert.dOmega, domega, 1e-8);
    mismatch("delta_eps", cert.delta_eps, delta_eps, 1e-8);
    mismatch("residual", cert.residual, residual, 1e-6);
    mismatch("bound_dX", cert.bound_dX,
             cert.scale_factor * std::pow(cert.eps, 1.0 - cert.params.beta_exp), 1e-8);
    mismatch("bound_dOmega", cert.bound_dOmega,
             2.0 * delta_eps +
                 cert.C * std::pow(cert.eps, cert.params.beta_exp - 2.0 * cert.params.delta_exp),
             1e-8);
    if (rc == kExitOk) std::printf("PASS\n");
    return rc;
}

}  // namespace

// "1e-2:1e-6:log3" = 3 log-spaced points from 1e-2 down to 1e-6; or a comma list
std::vector<double> parse_eps_grid(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        std::vector<double> out;
        size_t pos = 0;
        while (pos <= text.size()) {
            size_t next = text.find(',', pos);
            if (next == std::string::npos) next = text.size();
            out.push_back(std::stod(text.substr(pos, next - pos)));
            pos = next + 1;
        }
        return out;
    }
    auto colon2 = text.find(':', colon + 1);
    if (colon2 == std::string::npos || text.compare(colon2 + 1, 3, "log") != 0)
        throw ParseError("eps grid: expected LO,.. or A:B:logN, got \"" + text + "\"");
    double a = std::stod(text.substr(0, colon));
    double b = std::stod(text.substr(colon + 1, colon2 - colon - 1));
    int n = std::stoi(text.substr(colon2 + 4));
    if (n < 1 || a <= 0.0 || b <= 0.0)
        throw ParseError("eps grid: need positive endpoints and at least one point");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = n == 1 ? a : a * std::pow(b / a, double(i) / double(n - 1));
    return out;
}

int main(int argc, char** argv) {
    CLI::App app{"commuting replacements for nearly commuting state/observable pairs"};
    app.require_subcommand(1);

    double tol_scale = 1.0;
    app.add_option("--tol", tol_scale, "scale factor for internal numeric tolerances")
        ->envname("NEARCOMM_TOL")
        ->check(CLI::PositiveNumber);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a reproducible instance pair");
    std::string kind_name = "perturbed_commuting";
    InstanceRecipe recipe;
    std::string gen_out_omega = "omega.json", gen_out_x = "x.json";
    gen->add_option("--kind", kind_name,
                    "perturbed_commuting | clustered_spectrum | random_event | adversarial_gap")
        ->envname("NEARCOMM_GEN_KIND");
    gen->add_option("--dim", recipe.dim, "matrix dimension")
        ->check(CLI::Range(2, 4096))
        ->envname("NEARCOMM_GEN_DIM");
    gen->add_option("--eps", recipe.eps_target, "target commutator norm")
        ->envname("NEARCOMM_GEN_EPS");
    gen->add_option("--seed", recipe.seed, "rng seed")->envname("NEARCOMM_GEN_SEED");
    gen->add_option("--spectrum", recipe.spectrum, "explicit state spectrum (sums to 1)")
        ->delimiter(',')
        ->envname("NEARCOMM_GEN_SPECTRUM");
    gen->add_option("--out-omega", gen_out_omega, "output path for the state")
        ->envname("NEARCOMM_GEN_OUT_OMEGA");
    gen->add_option("--out-x", gen_out_x, "output path for the observable")
        ->envname("NEARCOMM_GEN_OUT_X");

    // approx
    auto* approx = app.add_subcommand("approx", "replace a pair by a commuting pair with bounds");
    std::string a_omega, a_x, a_out_omega = "omega_prime.json", a_out_x = "x_prime.json",
                a_out_cert = "cert.json";
    double a_eps = -1.0, a_delta = 0.25, a_beta = 0.75;
    bool a_mean = false;
    approx->add_option("--omega", a_omega, "state matrix file")
        ->required()
        ->envname("NEARCOMM_APPROX_OMEGA");
    approx->add_option("--x", a_x, "observable matrix file")
        ->required()
        ->envname("NEARCOMM_APPROX_X");
    approx->add_option("--eps", a_eps, "commutator bound (default: measured norm)")
        ->envname("NEARCOMM_APPROX_EPS");
    approx->add_option("--delta-exp", a_delta, "exponent for the small eigenvalue cutoff")
        ->envname("NEARCOMM_APPROX_DELTA_EXP");
    approx->add_option("--beta-exp", a_beta, "exponent for the gap threshold")
        ->envname("NEARCOMM_APPROX_BETA_EXP");
    approx->add_flag("--bin-average", a_mean,
                     "experimental: bin representatives by mean instead of minimum");
    approx->add_option("--out-omega", a_out_omega, "output path for the replaced state")
        ->envname("NEARCOMM_APPROX_OUT_OMEGA");
    approx->add_option("--out-x", a_out_x, "output path for the replaced observable")
        ->envname("NEARCOMM_APPROX_OUT_X");
    approx->add_option("--cert", a_out_cert, "output path for the certificate")
        ->envname("NEARCOMM_APPROX_CERT");

    // pinch
    auto* pinch = app.add_subcommand("pinch", "block diagonalize one operator in the basis of the other");
    std::string p_omega, p_x, p_out;
    bool p_state = false;
    pinch->add_option("--omega", p_omega, "state matrix file")
        ->required()
        ->envname("NEARCOMM_PINCH_OMEGA");
    pinch->add_option("--x", p_x, "observable matrix file")
        ->required()
        ->envname("NEARCOMM_PINCH_X");
    pinch->add_flag("--state", p_state, "pinch the state against the observable instead")
        ->envname("NEARCOMM_PINCH_STATE");
    pinch->add_option("--out", p_out, "output path for the pinched matrix")
        ->envname("NEARCOMM_PINCH_OUT");

    // event
    auto* event = app.add_subcommand("event", "truncate, assign outcomes, build the projective chain");
    std::string e_omega, e_x, e_out;
    double e_eps = 0.0, e_c1 = 1.0, e_c2 = 1.0, e_c3 = 1.0;
    event->add_option("--omega", e_omega, "state matrix file")
        ->required()
        ->envname("NEARCOMM_EVENT_OMEGA");
    event->add_option("--x", e_x, "observable matrix file")
        ->required()
        ->envname("NEARCOMM_EVENT_X");
    event->add_option("--eps", e_eps, "accuracy parameter")
        ->required()
        ->envname("NEARCOMM_EVENT_EPS");
    event->add_option("--c1", e_c1, "commutator slack constant")->envname("NEARCOMM_EVENT_C1");
    event->add_option("--c2", e_c2, "leakage slack constant")->envname("NEARCOMM_EVENT_C2");
    event->add_option("--c3", e_c3, "distance slack constant")->envname("NEARCOMM_EVENT_C3");
    event->add_option("--out-fin", e_out, "output path for the final rounded observable")
        ->envname("NEARCOMM_EVENT_OUT_FIN");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run a grid of instances and emit a CSV");
    std::vector<int> s_dims{2, 4, 8, 16};
    std::string s_eps_grid = "1e-2:1e-6:log5";
    std::vector<std::string> s_kinds{"perturbed_commuting"};
    int s_instances = 1;
    uint64_t s_seed = 0;
    double s_delta = 0.25, s_beta = 0.75;
    bool s_timing = false;
    std::string s_out;
    sweep->add_option("--dims", s_dims, "dimensions")->delimiter(',')->envname("NEARCOMM_SWEEP_DIMS");
    sweep->add_option("--eps-grid", s_eps_grid, "comma list or A:B:logN")
        ->envname("NEARCOMM_SWEEP_EPS_GRID");
    sweep->add_option("--kinds", s_kinds, "recipe kinds")
        ->delimiter(',')
        ->envname("NEARCOMM_SWEEP_KINDS");
    sweep->add_option("--instances", s_instances, "instances per grid cell")
        ->check(CLI::PositiveNumber)
        ->envname("NEARCOMM_SWEEP_INSTANCES");
    sweep->add_option("--seed", s_seed, "first seed of the family")->envname("NEARCOMM_SWEEP_SEED");
    sweep->add_option("--delta-exp", s_delta, "exponent for the small eigenvalue cutoff")
        ->envname("NEARCOMM_SWEEP_DELTA_EXP");
    sweep->add_option("--beta-exp", s_beta, "exponent for the gap threshold")
        ->envname("NEARCOMM_SWEEP_BETA_EXP");
    sweep->add_flag("--timing", s_timing, "record wall times (breaks byte reproducibility)")
        ->envname("NEARCOMM_SWEEP_TIMING");
    sweep->add_option("--out", s_out, "CSV output path (default: stdout)")
        ->envname("NEARCOMM_SWEEP_OUT");

    // verify
    auto* verify = app.add_subcommand("verify", "recheck a replacement pair against its certificate");
    std::string v_omega, v_x, v_omega_p, v_x_p, v_cert;
    verify->add_option("--omega", v_omega, "original state file")
        ->required()
        ->envname("NEARCOMM_VERIFY_OMEGA");
    verify->add_option("--x", v_x, "original observable file")
        ->required()
        ->envname("NEARCOMM_VERIFY_X");
    verify->add_option("--omega-prime", v_omega_p, "replacement state file")
        ->required()
        ->envname("NEARCOMM_VERIFY_OMEGA_PRIME");
    verify->add_option("--x-prime", v_x_p, "replacement observable file")
        ->required()
        ->envname("NEARCOMM_VERIFY_X_PRIME");
    verify->add_option("--cert", v_cert, "certificate file")
        ->required()
        ->envname("NEARCOMM_VERIFY_CERT");

    CLI11_PARSE(app, argc, argv);
    set_tolerance_scale(tol_scale);

    try {
        if (gen->parsed()) {
            recipe.kind = recipe_kind_from_string(kind_name);
            return cmd_gen(recipe, gen_out_omega, gen_out_x);
        }
        if (approx->parsed())
            return cmd_approx(a_omega, a_x, a_eps, BinningParams{0.0, a_delta, a_beta}, a_mean,
                              a_out_omega, a_out_x, a_out_cert);
        if (pinch->parsed()) return cmd_pinch(p_omega, p_x, p_state, p_out);
        if (event->parsed()) return cmd_event(e_omega, e_x, e_eps, e_c1, e_c2, e_c3, e_out);
        if (sweep->parsed())
            return cmd_sweep(s_dims, parse_eps_grid(s_eps_grid), s_kinds, s_instances, s_seed,
                             s_delta, s_beta, s_timing, s_out);
        if (verify->parsed()) return cmd_verify(v_omega, v_x, v_omega_p, v_x_p, v_cert);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitBadInput;
    } catch (const PreconditionViolation& e) {
        std::fprintf(stderr, "precondition failed: %s\n", e.what());
        return kExitBadInput;
    } catch (const DimensionMismatch& e) {
        std::fprintf(stderr, "dimension mismatch: %s\n", e.what());
        return kExitBadInput;
    } catch (const ConvergenceFailure& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitBadInput;
}

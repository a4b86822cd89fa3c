#include "nearcomm/generators.hpp"

#include <algorithm>
#include <cmath>

#include "nearcomm/errors.hpp"
#include "nearcomm/norms.hpp"
#include "nearcomm/rng.hpp"

namespace nearcomm {

const char* to_string(RecipeKind kind) {
    switch (kind) {
        case RecipeKind::perturbed_commuting: return "perturbed_commuting";
        case RecipeKind::clustered_spectrum: return "clustered_spectrum";
        case RecipeKind::random_event: return "random_event";
        case RecipeKind::adversarial_gap: return "adversarial_gap";
    }
    return "unknown";
}

RecipeKind recipe_kind_from_string(const std::string& name) {
    if (name == "perturbed_commuting") return RecipeKind::perturbed_commuting;
    if (name == "clustered_spectrum") return RecipeKind::clustered_spectrum;
    if (name == "random_event") return RecipeKind::random_event;
    if (name == "adversarial_gap") return RecipeKind::adversarial_gap;
    throw PreconditionViolation("unknown recipe kind: " + name);
}

namespace {

// Aim slightly under the requested commutator norm so that rounding in the
// dense basis change cannot push the measured value past eps_target.
constexpr double kEpsMargin = 5e-4;

// Head value large enough that the gap binning at the default exponents
// keeps at least one bin for eps up to about 1e-2.
double head_floor(double eps) {
    return eps > 0.0 ? 1.3 * std::pow(eps, 0.25) : 0.0;
}

// Geometric profile, largest first, normalized to sum 1. If the head would
// sit below head_floor(eps) it is raised and the tail rescaled.
std::vector<double> default_spectrum(int dim, double eps) {
    std::vector<double> v(dim);
    double s = 0.0;
    for (int j = 0; j < dim; ++j) {
        v[j] = std::pow(0.7, j);
        s += v[j];
    }
    for (double& w : v) w /= s;
    double need = head_floor(eps);
    if (v[0] < need && dim >= 2) {
        double head = std::min(0.6, need);
        double tail = 0.0;
        for (int j = 1; j < dim; ++j) tail += v[j];
        double scale = (1.0 - head) / tail;
        v[0] = head;
        for (int j = 1; j < dim; ++j) v[j] *= scale;
    }
    return v;
}

void validate_recipe(const InstanceRecipe& r) {
    if (r.dim < 2) throw PreconditionViolation("instance dim must be >= 2");
    if (!(r.eps_target >= 0.0) || !std::isfinite(r.eps_target) || r.eps_target > 0.5)
        throw PreconditionViolation("eps_target must lie in [0, 0.5]");
    if (!r.spectrum.empty()) {
        if ((int)r.spectrum.size() != r.dim)
            throw PreconditionViolation("explicit spectrum length must equal dim");
        double s = 0.0;
        for (double w : r.spectrum) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw PreconditionViolation("explicit spectrum entries must be >= 0");
            s += w;
        }
        if (std::abs(s - 1.0) > 1e-9)
            throw PreconditionViolation("explicit spectrum must sum to 1");
    }
}

// Conjugate the diagonal pair by a random unitary and add the perturbation
// that sets the commutator norm. omega_vals descending, |x0_vals| <= 0.9.
Instance finish_pair(Rng& rng, const std::vector<double>& omega_vals,
                     const std::vector<double>& x0_vals, double eps_target) {
    const int n = (int)omega_vals.size();
    Matrix u = random_unitary(rng, n);

    Matrix a0(n);
    if (eps_target > 0.0) {
        Matrix h = random_hermitian(rng, n);
        // [diag(omega), H] has entries (omega_i - omega_j) H_ij
        Matrix c(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                c(i, j) = (omega_vals[i] - omega_vals[j]) * h(i, j);
        double cn = operator_norm(c);
        if (cn < 1e-14)
            throw PreconditionViolation("state spectrum is scalar, cannot set a commutator norm");
        double t = eps_target * (1.0 - kEpsMargin) / cn;
        h *= cplx(t, 0.0);
        double hn = operator_norm(h);
        if (hn > 0.5)
            throw PreconditionViolation("eps_target too large for this spectrum: perturbation would dominate");
        double x0max = 0.0;
        for (double x : x0_vals) x0max = std::max(x0max, std::abs(x));
        double alpha = x0max > 0.0 ? std::min(1.0, (1.0 - hn) / x0max) : 1.0;
        for (int i = 0; i < n; ++i) a0(i, i) = alpha * x0_vals[i];
        a0 += h;
    } else {
        for (int i = 0; i < n; ++i) a0(i, i) = x0_vals[i];
    }

    Matrix d(n);
    for (int i = 0; i < n; ++i) d(i, i) = omega_vals[i];
    Matrix ua = u.adjoint();
    Matrix omega = u * d * ua;
    Matrix x = u * a0 * ua;

    Instance inst{DensityMatrix(HermitianOperator(omega)), HermitianOperator(x), 0.0};
    inst.eps_measured = operator_norm(commutator(inst.rho.matrix(), inst.x.matrix()));
    return inst;
}

std::vector<double> diag_x_values(Rng& rng, int n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-0.9, 0.9);
    return v;
}

Instance gen_perturbed(const InstanceRecipe& r, Rng& rng) {
    std::vector<double> omega = r.spectrum.empty() ? default_spectrum(r.dim, r.eps_target)
                                                   : r.spectrum;
    std::sort(omega.begin(), omega.end(), std::greater<double>());
    return finish_pair(rng, omega, diag_x_values(rng, r.dim), r.eps_target);
}

Instance gen_clustered(const InstanceRecipe& r, Rng& rng) {
    const int m = r.dim;
    const double eps = r.eps_target;
    int nc = m <= 7 ? 2 : (m <= 23 ? 3 : 4);
    std::vector<int> sizes(nc, m / nc);
    for (int i = 0; i < m % nc; ++i) sizes[i] += 1;

    // centers on a geometric profile, weighted so total mass is 1
    std::vector<double> centers(nc);
    double t = 0.0;
    for (int i = 0; i < nc; ++i) {
        centers[i] = std::pow(0.45, i);
        t += sizes[i] * centers[i];
    }
    for (double& c : centers) c /= t;

    double need = head_floor(eps);
    if (centers[0] < need) {
        // carve out a singleton head cluster, rebuild the rest underneath
        double head = std::min(0.6, need);
        sizes.assign(nc, 0);
        sizes[0] = 1;
        int rest = m - 1;
        int nrest = std::min(nc - 1, rest);
        if (nrest < 1) { nrest = 1; }
        for (int i = 0; i < nrest; ++i) sizes[1 + i] = rest / nrest + (i < rest % nrest ? 1 : 0);
        nc = 1 + nrest;
        sizes.resize(nc);
        centers.assign(nc, 0.0);
        centers[0] = head;
        double t2 = 0.0;
        for (int i = 1; i < nc; ++i) {
            centers[i] = std::pow(0.45, i);
            t2 += sizes[i] * centers[i];
        }
        for (int i = 1; i < nc; ++i) centers[i] *= (1.0 - head) / t2;
    }

    double min_sep = centers[nc - 1];
    for (int i = 0; i + 1 < nc; ++i) min_sep = std::min(min_sep, centers[i] - centers[i + 1]);
    // keep intra-cluster spread under eps^{3/4} and clusters far apart
    double eps_beta = eps > 0.0 ? std::pow(eps, 0.75) : 1e-9;
    double width = std::min({0.2 * eps_beta, 0.125 * min_sep, 0.25 * centers[nc - 1]});

    std::vector<double> omega;
    omega.reserve(m);
    for (int i = 0; i < nc; ++i) {
        std::vector<double> off(sizes[i]);
        double mean = 0.0;
        for (double& o : off) { o = rng.uniform(-1.0, 1.0) * width; mean += o; }
        mean /= std::max(1, sizes[i]);
        for (double o : off) omega.push_back(centers[i] + (o - mean));
    }
    double s = 0.0;
    for (double w : omega) s += w;
    for (double& w : omega) w /= s;
    std::sort(omega.begin(), omega.end(), std::greater<double>());
    return finish_pair(rng, omega, diag_x_values(rng, m), r.eps_target);
}

Instance gen_event(const InstanceRecipe& r, Rng& rng) {
    const int m = r.dim;
    std::vector<int> sizes;
    std::vector<double> values;
    if (!r.spectrum.empty()) {
        // group exactly equal entries of the explicit spectrum into blocks
        std::vector<double> sorted = r.spectrum;
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());
        int i = 0;
        while (i < m) {
            int j = i;
            while (j < m && sorted[j] == sorted[i]) ++j;
            sizes.push_back(j - i);
            values.push_back(sorted[i]);
            i = j;
        }
    } else {
        int nb = std::min({2 + (int)(rng.next_u64() % 3), 4, m});
        sizes.assign(nb, m / nb);
        for (int i = 0; i < m % nb; ++i) sizes[i] += 1;
        values.resize(nb);
        double t = 0.0;
        for (int i = 0; i < nb; ++i) {
            values[i] = std::pow(0.4, i);
            t += sizes[i] * values[i];
        }
        for (double& v : values) v /= t;
        double need = head_floor(r.eps_target);
        if (values[0] < need) {
            // shrink the top block to a singleton so its value can be raised
            double head = std::min(0.6, need);
            int rest = m - 1;
            int nrest = nb - 1;
            sizes.assign(nb, 0);
            sizes[0] = 1;
            for (int i = 0; i < nrest; ++i) sizes[1 + i] = rest / nrest + (i < rest % nrest ? 1 : 0);
            values[0] = head;
            double t2 = 0.0;
            for (int i = 1; i < nb; ++i) t2 += sizes[i] * values[i];
            for (int i = 1; i < nb; ++i) values[i] *= (1.0 - head) / t2;
        }
    }

    std::vector<double> omega, x0;
    omega.reserve(m);
    x0.reserve(m);
    for (size_t b = 0; b < sizes.size(); ++b) {
        double xi = rng.uniform(-0.9, 0.9);  // one observable value per block
        for (int j = 0; j < sizes[b]; ++j) {
            omega.push_back(values[b]);
            x0.push_back(xi);
        }
    }
    return finish_pair(rng, omega, x0, r.eps_target);
}

Instance gen_adversarial(const InstanceRecipe& r, Rng& rng) {
    const int m = r.dim;
    const double eps = r.eps_target > 0.0 ? r.eps_target : 1e-6;
    const double eps_beta = std::pow(eps, 0.75);
    const double base = std::min(0.55, 1.25 * std::pow(eps, 0.25));

    // ladder of consecutive gaps just under and just over eps^{3/4}
    int rungs = std::min(m - 1, 6);
    std::vector<double> omega;
    while (rungs >= 1) {
        omega.clear();
        std::vector<double> ladder(rungs);
        double v = base;
        double ladder_mass = 0.0;
        for (int j = 0; j < rungs; ++j) {
            ladder[j] = v;
            ladder_mass += v;
            double f = (j % 2 == 0) ? 0.85 + 0.10 * rng.uniform()
                                    : 1.05 + 0.10 * rng.uniform();
            v += f * eps_beta;
        }
        int micro = m - 1 - rungs;
        double mu = std::min(0.4 * std::pow(eps, 0.25), 0.05);
        std::vector<double> micros(std::max(0, micro));
        double micro_mass = 0.0;
        for (int j = 0; j < micro; ++j) {
            micros[j] = mu * std::pow(0.6, j + 1);
            micro_mass += micros[j];
        }
        double anchor = 1.0 - ladder_mass - micro_mass;
        if (anchor >= ladder.back() + 2.0 * eps_beta && anchor <= 0.98) {
            omega.push_back(anchor);
            for (int j = rungs - 1; j >= 0; --j) omega.push_back(ladder[j]);
            for (int j = 0; j < micro; ++j) omega.push_back(micros[j]);
            break;
        }
        --rungs;
    }
    if (omega.empty())
        throw PreconditionViolation("adversarial_gap ladder infeasible at this dim and eps_target");
    return finish_pair(rng, omega, diag_x_values(rng, m), r.eps_target);
}

}  // namespace

Instance gen_instance(const InstanceRecipe& recipe) {
    validate_recipe(recipe);
    Rng rng(recipe.seed ^ (uint64_t(static_cast<int>(recipe.kind) + 1) << 56) ^
            (uint64_t(recipe.dim) << 40));
    switch (recipe.kind) {
        case RecipeKind::perturbed_commuting: return gen_perturbed(recipe, rng);
        case RecipeKind::clustered_spectrum: return gen_clustered(recipe, rng);
        case RecipeKind::random_event: return gen_event(recipe, rng);
        case RecipeKind::adversarial_gap: return gen_adversarial(recipe, rng);
    }
    throw PreconditionViolation("unknown recipe kind");
}

}  // namespace nearcomm

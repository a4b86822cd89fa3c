#pragma once

#include <cstdint>
#include <string>

#include "nearcomm/spectral.hpp"

namespace nearcomm {

enum class RecipeKind {
    perturbed_commuting,  // commuting diagonal pair plus a scaled perturbation
    clustered_spectrum,   // state spectrum in tight clusters, separated wide
    random_event,         // degenerate blocks: both operators share coarse structure
    adversarial_gap,      // eigenvalue ladder with gaps straddling eps^{3/4}
};

const char* to_string(RecipeKind kind);
RecipeKind recipe_kind_from_string(const std::string& name);

struct InstanceRecipe {
    RecipeKind kind = RecipeKind::perturbed_commuting;
    int dim = 2;
    double eps_target = 1e-4;   // 0 builds an exactly commuting pair
    uint64_t seed = 0;
    std::vector<double> spectrum;  // optional explicit state spectrum
};

struct Instance {
    DensityMatrix rho;
    HermitianOperator x;
    double eps_measured = 0.0;  // ||[rho, X]||_op of the emitted pair
};

// Deterministic: the same recipe reproduces the same instance bit for bit.
// The emitted pair satisfies ||X|| <= 1 and ||[rho, X]|| within 1% of
// eps_target (slightly under it, so downstream preconditions hold).
// Infeasible recipes (eps_target too large for the requested structure,
// invalid explicit spectrum) are rejected with a message.
Instance gen_instance(const InstanceRecipe& recipe);

}  // namespace nearcomm

#pragma once

#include <cstdint>

#include "nearcomm/complex_matrix.hpp"

namespace nearcomm {

// xoshiro256++ seeded through splitmix64. Fixed algorithm so that streams
// are reproducible bit-for-bit from the 64-bit seed on any platform.
class Rng {
public:
    explicit Rng(uint64_t seed);

    uint64_t next_u64();
    double uniform();                      // [0, 1)
    double uniform_open();                 // (0, 1]
    double uniform(double lo, double hi);  // [lo, hi)
    double gaussian();                     // Box-Muller, no cached spare
    int uniform_int(int lo, int hi);       // inclusive bounds

private:
    uint64_t s_[4];
};

// Random Hermitian matrix: (G + G†)/2 with iid standard complex Gaussian G.
Matrix random_hermitian(Rng& rng, int dim);

// Random unitary: complex Gaussian matrix orthonormalized by two rounds of
// modified Gram-Schmidt.
Matrix random_unitary(Rng& rng, int dim);

}  // namespace nearcomm

#include "nearcomm/rng.hpp"

#include <cmath>

namespace nearcomm {

namespace {

uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& s : s_) s = splitmix64(x);
}

uint64_t Rng::next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

int Rng::uniform_int(int lo, int hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
}

Matrix random_hermitian(Rng& rng, int dim) {
    Matrix g(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = cplx(rng.gaussian(), rng.gaussian());
    return symmetrize(g);
}

Matrix random_unitary(Rng& rng, int dim) {
    Matrix g(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = cplx(rng.gaussian(), rng.gaussian());

    // Two passes of modified Gram-Schmidt on the columns.
    for (int pass = 0; pass < 2; ++pass) {
        for (int c = 0; c < dim; ++c) {
            for (int prev = 0; prev < c; ++prev) {
                cplx dot = 0.0;
                for (int i = 0; i < dim; ++i) dot += std::conj(g(i, prev)) * g(i, c);
                for (int i = 0; i < dim; ++i) g(i, c) -= dot * g(i, prev);
            }
            double nrm = 0.0;
            for (int i = 0; i < dim; ++i) nrm += std::norm(g(i, c));
            nrm = std::sqrt(nrm);
            if (nrm < 1e-12) {  // essentially impossible for Gaussian draws
                for (int i = 0; i < dim; ++i) g(i, c) = (i == c) ? 1.0 : 0.0;
                nrm = 1.0;
            }
            for (int i = 0; i < dim; ++i) g(i, c) /= nrm;
        }
    }
    return g;
}

}  // namespace nearcomm

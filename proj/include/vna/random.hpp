#pragma once

#include <cstdint>

#include "vna/linalg.hpp"

// Counter-based pseudo-random generator. Every draw is a pure function of
// (seed, counter), so any implementation that follows the recipe below
// reproduces the exact stream:
//   state_k = splitmix64(seed ^ (0x9E3779B97F4A7C15 * (k+1)))
// with splitmix64 the standard finalizer. Doubles are the top 53 bits / 2^53.

namespace vna::rng {

class Counter {
public:
    explicit Counter(std::uint64_t seed) : seed_(seed), counter_(0) {}

    std::uint64_t next_u64();

    /// Uniform in [0, 1).
    double next_double();

    /// Standard normal via Box-Muller (consumes two uniforms per pair).
    double next_gaussian();

    linalg::cplx next_complex_gaussian();  // (g1 + i g2)/sqrt(2)

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Ginibre density: rho = G G^dagger / Tr(G G^dagger), G with iid standard
/// complex normal entries.
linalg::CMatrix ginibre_density(Counter& rng, int dim);

/// Haar-random pure state vector (normalized complex Gaussian).
std::vector<linalg::cplx> haar_vector(Counter& rng, int dim);

/// Random Hermitian with iid Gaussian entries (GUE-style, unnormalized).
linalg::CMatrix gaussian_hermitian(Counter& rng, int dim);

/// Random unitary via Gram-Schmidt on a Ginibre matrix.
linalg::CMatrix haar_unitary(Counter& rng, int dim);

/// Dirichlet(1,...,1) weights (normalized exponentials).
std::vector<double> dirichlet_uniform(Counter& rng, int n);

}  // namespace vna::rng

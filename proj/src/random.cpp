#include "vna/random.hpp"

#include <cmath>

namespace vna::rng {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Counter::next_u64() {
    ++counter_;
    return splitmix64(seed_ ^ (0x9E3779B97F4A7C15ULL * counter_));
}

double Counter::next_double() {
    return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
}

double Counter::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 in (0,1] to keep log finite.
    double u1 = 1.0 - next_double();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
}

linalg::cplx Counter::next_complex_gaussian() {
    double re = next_gaussian();
    double im = next_gaussian();
    return linalg::cplx(re, im) * (1.0 / std::sqrt(2.0));
}

linalg::CMatrix ginibre_density(Counter& rng, int dim) {
    linalg::CMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.next_complex_gaussian();
    linalg::CMatrix rho = g * g.adjoint();
    double tr = rho.trace().real();
    rho *= linalg::cplx(1.0 / tr, 0.0);
    return rho;
}

std::vector<linalg::cplx> haar_vector(Counter& rng, int dim) {
    std::vector<linalg::cplx> v(dim);
    double n2 = 0;
    for (auto& z : v) {
        z = rng.next_complex_gaussian();
        n2 += std::norm(z);
    }
    double inv = 1.0 / std::sqrt(n2);
    for (auto& z : v) z *= inv;
    return v;
}

linalg::CMatrix gaussian_hermitian(Counter& rng, int dim) {
    linalg::CMatrix h(dim, dim);
    for (int i = 0; i < dim; ++i) {
        h(i, i) = rng.next_gaussian();
        for (int j = i + 1; j < dim; ++j) {
            auto z = rng.next_complex_gaussian();
            h(i, j) = z;
            h(j, i) = std::conj(z);
        }
    }
    return h;
}

linalg::CMatrix haar_unitary(Counter& rng, int dim) {
    linalg::CMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.next_complex_gaussian();
    // Gram-Schmidt on columns.
    for (int c = 0; c < dim; ++c) {
        for (int p = 0; p < c; ++p) {
            linalg::cplx ip = 0;
            for (int i = 0; i < dim; ++i) ip += std::conj(g(i, p)) * g(i, c);
            for (int i = 0; i < dim; ++i) g(i, c) -= ip * g(i, p);
        }
        double n2 = 0;
        for (int i = 0; i < dim; ++i) n2 += std::norm(g(i, c));
        double inv = 1.0 / std::sqrt(n2);
        for (int i = 0; i < dim; ++i) g(i, c) *= inv;
    }
    return g;
}

std::vector<double> dirichlet_uniform(Counter& rng, int n) {
    std::vector<double> w(n);
    double s = 0;
    for (auto& x : w) {
        x = -std::log(1.0 - rng.next_double());
        s += x;
    }
    for (auto& x : w) x /= s;
    return w;
}

}  // namespace vna::rng

#include "doctest.h"

#include <cmath>

#include "vna/linalg.hpp"
#include "vna/random.hpp"

using namespace vna::linalg;

namespace {

CMatrix from_rows(int n, std::initializer_list<cplx> vals) {
    CMatrix m(n, n);
    int k = 0;
    for (auto v : vals) {
        m(k / n, k % n) = v;
        ++k;
    }
    return m;
}

double reconstruction_error(const CMatrix& m, const EigResult& e) {
    const int n = m.rows();
    CMatrix rec(n, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                rec(i, j) += e.values[static_cast<size_t>(k)] * e.vectors(i, k) *
                             std::conj(e.vectors(j, k));
    return op_norm(rec - m);
}

}  // namespace

TEST_CASE("herm_eig identity and diagonal") {
    auto e = herm_eig(CMatrix::identity(2));
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(1.0));
    CHECK(op_norm(e.vectors.adjoint() * e.vectors - CMatrix::identity(2)) < 1e-10);

    auto ed = herm_eig(CMatrix::diag({3, 1}));
    CHECK(ed.values[0] == doctest::Approx(3.0));
    CHECK(ed.values[1] == doctest::Approx(1.0));
}

TEST_CASE("herm_eig Pauli X") {
    // characteristic polynomial x^2 - 1 by hand: eigenvalues +-1
    CMatrix x = from_rows(2, {0, 1, 1, 0});
    auto e = herm_eig(x);
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(-1.0));
    CHECK(reconstruction_error(x, e) < 1e-10);
}

TEST_CASE("herm_eig rejects non-hermitian") {
    CMatrix m = from_rows(2, {0, 1, 2, 0});
    CHECK_THROWS_AS(herm_eig(m, 1e-9), NonHermitian);
}

TEST_CASE("herm_eig random matrices: unitarity, sorting, reconstruction") {
    vna::rng::Counter rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 2 + static_cast<int>(rng.next_u64() % 7);
        CMatrix m = vna::rng::gaussian_hermitian(rng, n);
        auto e = herm_eig(m);
        CHECK(op_norm(e.vectors.adjoint() * e.vectors - CMatrix::identity(n)) < 1e-10);
        for (size_t k = 1; k < e.values.size(); ++k) CHECK(e.values[k - 1] >= e.values[k]);
        CHECK(reconstruction_error(m, e) <= 1e-10 * std::max(1.0, op_norm(m)));
    }
}

TEST_CASE("psd_sqrt basics") {
    CHECK(op_norm(psd_sqrt(CMatrix::identity(3)) - CMatrix::identity(3)) < 1e-12);
    auto r = psd_sqrt(CMatrix::diag({4, 9}));
    CHECK(op_norm(r - CMatrix::diag({2, 3})) < 1e-12);
    // rank-1 projector is idempotent
    CMatrix p = from_rows(2, {0.5, 0.5, 0.5, 0.5});
    CHECK(op_norm(psd_sqrt(p) - p) < 1e-10);
    // squared reconstruction on random PSD
    vna::rng::Counter rng(11);
    for (int t = 0; t < 10; ++t) {
        CMatrix rho = vna::rng::ginibre_density(rng, 4);
        CMatrix s = psd_sqrt(rho);
        CHECK(op_norm(s * s - rho) < 1e-9);
        CHECK(s.is_psd(1e-9));
    }
    CHECK_THROWS_AS(psd_sqrt(CMatrix::diag({1, -0.5})), NotPsd);
}

TEST_CASE("trace_norm") {
    CHECK(trace_norm(CMatrix::zero(2, 2)) == doctest::Approx(0.0));
    vna::rng::Counter rng(3);
    CMatrix rho = vna::rng::ginibre_density(rng, 3);
    CHECK(trace_norm(rho) == doctest::Approx(1.0));
    CMatrix d = CMatrix::diag({0.75, 0.25}) - CMatrix::diag({0.5, 0.5});
    CHECK(trace_norm(d) == doctest::Approx(0.5));
}

TEST_CASE("trace_norm multiplicative over kron") {
    vna::rng::Counter rng(5);
    for (int t = 0; t < 10; ++t) {
        CMatrix a = vna::rng::gaussian_hermitian(rng, 2);
        CMatrix b = vna::rng::gaussian_hermitian(rng, 3);
        CHECK(trace_norm(kron(a, b)) ==
              doctest::Approx(trace_norm(a) * trace_norm(b)).epsilon(1e-9));
    }
}

TEST_CASE("partial_trace") {
    vna::rng::Counter rng(9);
    CMatrix ra = vna::rng::ginibre_density(rng, 2);
    CMatrix rb = vna::rng::ginibre_density(rng, 3);
    CMatrix ab = kron(ra, rb);
    CHECK(op_norm(partial_trace(ab, 0, 2, 3) - ra) < 1e-12);
    CHECK(op_norm(partial_trace(ab, 1, 2, 3) - rb) < 1e-12);

    // maximally entangled qubit pair
    CMatrix phi(4, 4);
    for (int i : {0, 3})
        for (int j : {0, 3}) phi(i, j) = 0.5;
    CHECK(op_norm(partial_trace(phi, 0, 2, 2) - CMatrix::diag({0.5, 0.5})) < 1e-12);

    // identity/4 on 2x2 keep B
    CMatrix q = CMatrix::identity(4);
    q *= cplx(0.25, 0);
    CHECK(op_norm(partial_trace(q, 1, 2, 2) - CMatrix::diag({0.5, 0.5})) < 1e-12);

    // trace preservation + composition
    CMatrix m = vna::rng::gaussian_hermitian(rng, 6);
    CHECK(partial_trace(m, 0, 2, 3).trace().real() == doctest::Approx(m.trace().real()));
    CHECK(partial_trace(partial_trace(m, 0, 2, 3), 0, 1, 2).trace().real() ==
          doctest::Approx(m.trace().real()));
}

TEST_CASE("partial_trace_with inserts an operator") {
    vna::rng::Counter rng(13);
    CMatrix ra = vna::rng::ginibre_density(rng, 2);
    CMatrix rb = vna::rng::ginibre_density(rng, 2);
    CMatrix op = vna::rng::gaussian_hermitian(rng, 2);
    CMatrix ab = kron(ra, rb);
    // Tr_B[(ra (x) rb)(1 (x) op)] = ra * Tr(rb op)
    CMatrix expect = ra;
    expect *= (rb * op).trace();
    CHECK(op_norm(partial_trace_with(ab, op, 2, 2) - expect) < 1e-12);
}

TEST_CASE("support projector and pseudo powers") {
    CMatrix m = CMatrix::diag({2.0, 1.0, 0.0});
    CMatrix p = support_projector(m);
    CHECK(op_norm(p - CMatrix::diag({1, 1, 0})) < 1e-12);
    CMatrix inv = psd_pow(m, -1.0);
    CHECK(op_norm(inv - CMatrix::diag({0.5, 1.0, 0.0})) < 1e-12);
}

TEST_CASE("rng determinism") {
    vna::rng::Counter a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    vna::rng::Counter c(43);
    CHECK(a.next_u64() != c.next_u64());
}

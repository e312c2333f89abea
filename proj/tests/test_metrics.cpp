#include "doctest.h"

#include <cmath>

#include "vna/metrics.hpp"
#include "vna/random.hpp"

using namespace vna::states;
using namespace vna::metrics;
using namespace vna::algebra;
using vna::linalg::CMatrix;
using vna::linalg::cplx;

namespace {

State random_sub_state(vna::rng::Counter& rng, const Algebra& alg, double total) {
    auto w = vna::rng::dirichlet_uniform(rng, alg.num_blocks());
    std::vector<CMatrix> dens;
    for (int k = 0; k < alg.num_blocks(); ++k) {
        CMatrix d = vna::rng::ginibre_density(rng, alg.block(k).dim);
        d *= cplx(total * w[static_cast<size_t>(k)], 0);
        dens.push_back(d);
    }
    return make_state(alg, std::move(dens));
}

State classical_state(const std::vector<double>& p) {
    Algebra alg = classical_algebra(static_cast<int>(p.size()));
    std::vector<CMatrix> dens;
    for (double v : p) {
        CMatrix m(1, 1);
        m(0, 0) = v;
        dens.push_back(m);
    }
    return make_state(alg, std::move(dens));
}

State pure_qubit(cplx a0, cplx a1) {
    CMatrix m(2, 2);
    m(0, 0) = a0 * std::conj(a0);
    m(0, 1) = a0 * std::conj(a1);
    m(1, 0) = a1 * std::conj(a0);
    m(1, 1) = a1 * std::conj(a1);
    return make_state(full_matrix_algebra(2), {m});
}

}  // namespace

TEST_CASE("fidelity examples") {
    vna::rng::Counter rng(51);
    Algebra m2 = full_matrix_algebra(2);
    State rho = random_sub_state(rng, m2, 1.0);
    CHECK(fidelity(rho, rho) == doctest::Approx(1.0));

    // pure states: |<psi|phi>|^2
    State psi = pure_qubit(1, 0);
    State phi = pure_qubit(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    CHECK(fidelity(psi, phi) == doctest::Approx(0.5));

    State u = classical_state({0.5, 0.5});
    State v = classical_state({0.75, 0.25});
    double expect = std::pow(std::sqrt(0.375) + std::sqrt(0.125), 2.0);
    CHECK(fidelity(u, v) == doctest::Approx(expect));
    CHECK(expect == doctest::Approx(0.93301).epsilon(1e-4));
    CHECK(fidelity(u, v) == doctest::Approx(fidelity(v, u)));
}

TEST_CASE("fidelity agrees with the unitary-in-commutant form") {
    // F = sup_{U in commutant} |<xi_omega| U xi_sigma>|^2; on the standard form
    // the supremum is the nuclear norm of S^dagger T, attained by the SVD unitary.
    vna::rng::Counter rng(53);
    Algebra m2 = full_matrix_algebra(2);
    for (int t = 0; t < 10; ++t) {
        State omega = random_sub_state(rng, m2, 1.0);
        State sigma = random_sub_state(rng, m2, 1.0);
        CMatrix s = vna::linalg::psd_sqrt(omega.density(0));
        CMatrix tt = vna::linalg::psd_sqrt(sigma.density(0));
        CMatrix prod = s.adjoint() * tt;
        double nuclear = vna::linalg::trace_norm(prod);
        CHECK(fidelity(omega, sigma) == doctest::Approx(nuclear * nuclear).epsilon(1e-8));
        // random unitaries in the commutant never exceed the closed form
        for (int u = 0; u < 10; ++u) {
            CMatrix uu = vna::rng::haar_unitary(rng, 2);
            // <vec(s), (1 (x) u) vec(t)> = Tr(s^dagger t u^T)
            cplx overlap = (prod * uu.transpose()).trace();
            CHECK(std::norm(overlap) <= nuclear * nuclear + 1e-9);
        }
    }
}

TEST_CASE("generalized fidelity") {
    vna::rng::Counter rng(55);
    Algebra m2 = full_matrix_algebra(2);
    State a = random_sub_state(rng, m2, 1.0);
    State b = random_sub_state(rng, m2, 1.0);
    CHECK(generalized_fidelity(a, b) == doctest::Approx(fidelity(a, b)));

    State sub = random_sub_state(rng, m2, 0.6);
    CHECK(generalized_fidelity(sub, sub) == doctest::Approx(1.0));

    State o0 = make_state(m2, {[] {
                              CMatrix m(2, 2);
                              m(0, 0) = 0.5;
                              return m;
                          }()});
    State o1 = make_state(m2, {[] {
                              CMatrix m(2, 2);
                              m(1, 1) = 0.5;
                              return m;
                          }()});
    CHECK(generalized_fidelity(o0, o1) == doctest::Approx(0.25));
}

TEST_CASE("purified distance") {
    vna::rng::Counter rng(57);
    Algebra m2 = full_matrix_algebra(2);
    State a = random_sub_state(rng, m2, 0.8);
    CHECK(purified_distance(a, a) == doctest::Approx(0.0));

    State psi = pure_qubit(1, 0);
    State phi = pure_qubit(0, 1);
    CHECK(purified_distance(psi, phi) == doctest::Approx(1.0));

    State u = classical_state({0.5, 0.5});
    State v = classical_state({0.75, 0.25});
    CHECK(purified_distance(u, v) == doctest::Approx(0.25882).epsilon(1e-4));
}

TEST_CASE("norm distance") {
    Algebra m2 = full_matrix_algebra(2);
    State psi = pure_qubit(1, 0);
    CHECK(norm_distance(psi, psi) == doctest::Approx(0.0));
    State phi = pure_qubit(0, 1);
    CHECK(norm_distance(psi, phi) == doctest::Approx(2.0));
    CHECK(norm_distance(classical_state({0.75, 0.25}), classical_state({0.5, 0.5})) ==
          doctest::Approx(0.5));
}

TEST_CASE("distance sandwich on random subnormalized pairs") {
    // sqrt(ND + |dw|) >= P >= (ND + |dw|)/2
    vna::rng::Counter rng(59);
    std::vector<Algebra> shapes = {full_matrix_algebra(2), full_matrix_algebra(3),
                                   make_algebra({{2, 1}, {1, 1}}), classical_algebra(4)};
    for (const auto& alg : shapes) {
        for (int t = 0; t < 200; ++t) {
            State a = random_sub_state(rng, alg, 0.2 + 0.8 * rng.next_double());
            State b = random_sub_state(rng, alg, 0.2 + 0.8 * rng.next_double());
            double nd = norm_distance(a, b);
            double dw = std::abs(a.weight() - b.weight());
            double p = purified_distance(a, b);
            CHECK(std::sqrt(nd + dw) >= p - 1e-9);
            CHECK(p >= 0.5 * (nd + dw) - 1e-9);
        }
    }
}

TEST_CASE("monotonicity under restriction and measurement") {
    vna::rng::Counter rng(61);
    Algebra m2 = full_matrix_algebra(2);
    Algebra ab = tensor(m2, m2);
    for (int t = 0; t < 30; ++t) {
        State a = random_sub_state(rng, ab, 1.0);
        State b = random_sub_state(rng, ab, 1.0);
        double f_joint = fidelity(a, b);
        State ra = restrict(a, m2, m2, Keep::First);
        State rb = restrict(b, m2, m2, Keep::First);
        CHECK(fidelity(ra, rb) >= f_joint - 1e-9);
        CHECK(purified_distance(ra, rb) <= purified_distance(a, b) + 1e-9);

        // measurement channel on the first factor
        AlgebraElement e0, e1;
        e0.algebra = e1.algebra = &m2;
        CMatrix p0(2, 2), p1(2, 2);
        p0(0, 0) = 1;
        p1(1, 1) = 1;
        e0.block_matrices = {p0};
        e1.block_matrices = {p1};
        Povm z = make_povm(m2, {"0", "1"}, {e0, e1});
        CqState ma = cq_from_measurement(a, m2, m2, z);
        CqState mb = cq_from_measurement(b, m2, m2, z);
        CHECK(fidelity(ma, mb) >= f_joint - 1e-9);
    }
}

TEST_CASE("purified distance symmetry and triangle inequality") {
    vna::rng::Counter rng(63);
    Algebra alg = make_algebra({{2, 1}, {1, 1}});
    for (int t = 0; t < 50; ++t) {
        State a = random_sub_state(rng, alg, 0.3 + 0.7 * rng.next_double());
        State b = random_sub_state(rng, alg, 0.3 + 0.7 * rng.next_double());
        State c = random_sub_state(rng, alg, 0.3 + 0.7 * rng.next_double());
        CHECK(purified_distance(a, b) == doctest::Approx(purified_distance(b, a)).epsilon(1e-10));
        CHECK(purified_distance(a, c) <= purified_distance(a, b) + purified_distance(b, c) + 1e-9);
    }
}

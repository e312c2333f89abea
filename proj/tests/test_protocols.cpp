#include "doctest.h"

#include <cmath>

#include "vna/protocols.hpp"
#include "vna/random.hpp"

using namespace vna::protocols;
using namespace vna::states;
using namespace vna::algebra;
using namespace vna::hashing;
using vna::linalg::CMatrix;
using vna::linalg::cplx;

namespace {

CMatrix scalar(double v) {
    CMatrix m(1, 1);
    m(0, 0) = v;
    return m;
}

CMatrix ketbra(std::vector<cplx> amps) {
    int n = static_cast<int>(amps.size());
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = amps[static_cast<size_t>(i)] * std::conj(amps[static_cast<size_t>(j)]);
    return m;
}

CqState uniform_bits(int a) {
    Algebra triv = trivial_algebra();
    std::vector<std::string> alphabet;
    std::vector<std::vector<CMatrix>> parts;
    int nx = 1 << a;
    for (int x = 0; x < nx; ++x) {
        alphabet.push_back(std::to_string(x));
        parts.push_back({scalar(1.0 / nx)});
    }
    return make_cq_state(alphabet, triv, parts);
}

// uniform a-bit X with a classical E holding a perfect copy of the first bit
CqState copy_first_bit(int a) {
    Algebra e = classical_algebra(2);
    std::vector<std::string> alphabet;
    std::vector<std::vector<CMatrix>> parts;
    int nx = 1 << a;
    for (int x = 0; x < nx; ++x) {
        alphabet.push_back(std::to_string(x));
        int bit = x & 1;
        std::vector<CMatrix> p = {scalar(bit == 0 ? 1.0 / nx : 0.0),
                                  scalar(bit == 1 ? 1.0 / nx : 0.0)};
        parts.push_back(p);
    }
    return make_cq_state(alphabet, e, parts);
}

// uniform a-bit X perfectly copied into classical B
CqState perfect_copy(int a) {
    int nx = 1 << a;
    Algebra b = classical_algebra(nx);
    std::vector<std::string> alphabet;
    std::vector<std::vector<CMatrix>> parts;
    for (int x = 0; x < nx; ++x) {
        alphabet.push_back(std::to_string(x));
        std::vector<CMatrix> p;
        for (int y = 0; y < nx; ++y) p.push_back(scalar(x == y ? 1.0 / nx : 0.0));
        parts.push_back(p);
    }
    return make_cq_state(alphabet, b, parts);
}

Povm qubit_povm(const Algebra& m2, const CMatrix& e0) {
    AlgebraElement a0, a1;
    a0.algebra = a1.algebra = &m2;
    a0.block_matrices = {e0};
    a1.block_matrices = {CMatrix::identity(2) - e0};
    return make_povm(m2, {"0", "1"}, {a0, a1});
}

}  // namespace

TEST_CASE("pa_run examples") {
    SUBCASE("uniform 2 bits, trivial E, b = 1") {
        CqState omega = uniform_bits(2);
        auto fam = make_family(2, 1);
        auto rep = pa_run(omega, 1, fam, EnumMode::Exact);
        CHECK(rep.exact);
        CHECK(rep.best_distance == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(rep.bound == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
        CHECK(rep.avg_distance <= rep.bound + 1e-9);
    }

    SUBCASE("classical copy of the first bit, b = 1") {
        CqState omega = copy_first_bit(2);
        auto fam = make_family(2, 1);
        auto rep = pa_run(omega, 1, fam, EnumMode::Exact);
        CHECK(rep.hmin_bits == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(rep.bound == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(rep.avg_distance <= 1.0 + 1e-9);
    }

    SUBCASE("deterministic source: distance 1 for every f") {
        Algebra triv = trivial_algebra();
        std::vector<std::vector<CMatrix>> parts = {
            {scalar(1.0)}, {scalar(0.0)}, {scalar(0.0)}, {scalar(0.0)}};
        CqState omega = make_cq_state({"0", "1", "2", "3"}, triv, parts);
        auto fam = make_family(2, 1);
        auto rep = pa_run(omega, 1, fam, EnumMode::Exact);
        CHECK(rep.avg_distance == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.hmin_bits == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(rep.bound == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    }

    SUBCASE("monte carlo mode is deterministic and bounded") {
        CqState omega = copy_first_bit(3);
        auto fam = make_family(3, 2, FamilyKind::AllLinear, 1234);
        auto r1 = pa_run(omega, 2, fam, EnumMode::Sample, 40);
        auto r2 = pa_run(omega, 2, fam, EnumMode::Sample, 40);
        CHECK(r1.avg_distance == doctest::Approx(r2.avg_distance).epsilon(1e-15));
        CHECK_FALSE(r1.exact);
        CHECK(r1.avg_distance <= r1.bound + 3 * r1.stderr_mc + 1e-9);
    }
}

TEST_CASE("pa smooth bound at eps = 0.05") {
    CqState omega = copy_first_bit(2);
    auto fam = make_family(2, 1);
    auto rep = pa_run(omega, 1, fam, EnumMode::Exact, 0, 0.05);
    CHECK(rep.epsilon == doctest::Approx(0.05));
    CHECK(rep.avg_distance <= rep.bound + 1e-9);
    CHECK(rep.hmin_bits >= 1.0 - 1e-6);  // smoothing can only help
}

TEST_CASE("pa_key_length") {
    SUBCASE("constants dominate at desk scale") {
        CqState omega = uniform_bits(3);
        auto out = pa_key_length(omega, 0.2);
        CHECK(out.hmin_eps5 >= 3.0 - 1e-6);
        CHECK(out.achievable == 0);  // floor of 2^(3 - 9.29...)
        CHECK(out.achievable_log <= out.converse_log + 1e-6);
    }

    SUBCASE("monotone in eps") {
        CqState omega = copy_first_bit(2);
        double prev = -1e9;
        for (double eps : {0.05, 0.1, 0.2, 0.4}) {
            auto out = pa_key_length(omega, eps);
            CHECK(out.achievable_log >= prev - 1e-6);
            prev = out.achievable_log;
        }
    }

    SUBCASE("independent uniform bit adds one bit of smooth min-entropy") {
        CqState omega = copy_first_bit(2);
        // append an independent uniform bit to X
        CqState bigger;
        bigger.b = omega.b;
        for (int u = 0; u < 2; ++u)
            for (size_t x = 0; x < omega.alphabet.size(); ++x) {
                bigger.alphabet.push_back(std::to_string(x + 4 * u));
                std::vector<CMatrix> part;
                for (const auto& blk : omega.parts[x]) {
                    CMatrix m = blk;
                    m *= cplx(0.5, 0);
                    part.push_back(m);
                }
                bigger.parts.push_back(std::move(part));
            }
        double eps = 0.1;
        auto h_small = vna::entropy::hmin_smooth(Conditional::from_cq(omega), eps);
        auto h_big = vna::entropy::hmin_smooth(Conditional::from_cq(bigger), eps);
        CHECK(h_big.value - h_small.value == doctest::Approx(1.0).epsilon(1e-5));
    }
}

TEST_CASE("dc_build examples") {
    SUBCASE("perfect classical side information decodes exactly") {
        CqState omega = perfect_copy(2);
        auto fam = make_family(2, 1);
        auto rep = dc_build(omega, fam, EnumMode::Exact);
        CHECK(rep.hmax_bits == doctest::Approx(0.0).epsilon(1e-5));
        CHECK(rep.avg_p_err <= 1e-9);
        CHECK(rep.p_err <= 1e-9);
        CHECK(rep.bound == doctest::Approx(std::sqrt(8.0 / 2.0)).epsilon(1e-4));
    }

    SUBCASE("full transmission: identity encoding reaches zero error") {
        CqState omega = uniform_bits(2);
        auto fam = make_family(2, 2);
        auto rep = dc_build(omega, fam, EnumMode::Exact);
        CHECK(rep.p_err <= 1e-9);  // best member is a bijection
    }

    SUBCASE("uniform 2-bit X, trivial B, |C| = 2") {
        CqState omega = uniform_bits(2);
        auto fam = make_family(2, 1);
        auto rep = dc_build(omega, fam, EnumMode::Exact);
        CHECK(rep.hmax_bits == doctest::Approx(2.0).epsilon(1e-5));
        CHECK(rep.bound == doctest::Approx(4.0).epsilon(1e-4));
        CHECK(rep.p_err == doctest::Approx(0.5).epsilon(1e-9));
    }

    SUBCASE("decoder validity: PSD elements summing below identity") {
        vna::rng::Counter rng(211);
        Algebra m2 = full_matrix_algebra(2);
        auto w = vna::rng::dirichlet_uniform(rng, 4);
        std::vector<std::string> alphabet;
        std::vector<std::vector<CMatrix>> parts;
        for (int x = 0; x < 4; ++x) {
            alphabet.push_back(std::to_string(x));
            CMatrix d = vna::rng::ginibre_density(rng, 2);
            d *= cplx(w[static_cast<size_t>(x)], 0);
            parts.push_back({d});
        }
        CqState omega = make_cq_state(alphabet, m2, parts);
        auto rep = dc_build(omega, make_family(2, 1), EnumMode::Exact);
        for (const auto& povm : rep.decoder) {
            CMatrix sum = CMatrix::zero(2, 2);
            for (const auto& e : povm.elements) {
                auto eig = vna::linalg::herm_eig(e.block_matrices[0], 1e-6);
                CHECK(eig.values.back() > -1e-9);
                sum += e.block_matrices[0];
            }
            CHECK(vna::linalg::op_norm(sum - CMatrix::identity(2)) < 1e-9);
        }
        CHECK(rep.avg_p_err <= rep.bound + 1e-9);
    }
}

TEST_CASE("dc_message_length") {
    SUBCASE("perfect copy: constants dominate") {
        CqState omega = perfect_copy(2);
        auto out = dc_message_length(omega, 0.1);
        CHECK(out.hmax_eps2 <= 1e-5);
        CHECK(out.message_log <= 2.0 * std::log2(10.0) + 6.0 + 1e-5);
    }

    SUBCASE("trivial B: |C| at least |X| up to constants") {
        CqState omega = uniform_bits(3);
        auto out = dc_message_length(omega, 0.1);
        CHECK(out.message_log >= 3.0 - 0.5);  // Hmax^eps slightly below log|X|
        CHECK(out.message_size >= 8);
    }

    SUBCASE("monotone: |C| non-increasing in eps") {
        CqState omega = uniform_bits(2);
        double prev = 1e300;
        for (double eps : {0.05, 0.1, 0.2}) {
            auto out = dc_message_length(omega, eps);
            CHECK(out.message_log <= prev + 1e-6);
            prev = out.message_log;
        }
    }
}

TEST_CASE("uncertainty_check examples") {
    Algebra m2 = full_matrix_algebra(2);
    Algebra triv = trivial_algebra();
    double h = 1.0 / std::sqrt(2.0);
    Povm zb = qubit_povm(m2, ketbra({1, 0}));
    Povm xb = qubit_povm(m2, ketbra({h, h}));

    SUBCASE("|0> state, trivial B and C: equality at eps = 0") {
        State psi = make_state(tensor(tensor(m2, triv), triv), {ketbra({1, 0})});
        auto rep = uncertainty_check(psi, m2, triv, triv, zb, xb, 0.0);
        CHECK(rep.overlap_c == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(rep.rhs == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.hmin_xb == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(rep.hmax_yc == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(rep.holds);
        CHECK(std::abs(rep.lhs - rep.rhs) < 1e-6);
    }

    SUBCASE("A maximally entangled with B, trivial C") {
        CMatrix phi = ketbra({h, 0, 0, h});
        State ent = make_state(tensor(tensor(m2, m2), triv), {phi});
        auto rep = uncertainty_check(ent, m2, m2, triv, zb, xb, 0.0);
        CHECK(rep.hmin_xb == doctest::Approx(0.0).epsilon(1e-6));  // pguess = 1
        CHECK(rep.hmax_yc == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(rep.holds);
    }

    SUBCASE("identical measurements: rhs = 0") {
        vna::rng::Counter rng(223);
        CMatrix rho = vna::rng::ginibre_density(rng, 2);
        State s = make_state(tensor(tensor(m2, triv), triv), {rho});
        auto rep = uncertainty_check(s, m2, triv, triv, zb, zb, 0.0);
        CHECK(rep.overlap_c == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.rhs == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(rep.lhs >= -1e-6);
        CHECK(rep.holds);
    }
}

TEST_CASE("uncertainty choi constant") {
    Algebra m2 = full_matrix_algebra(2);
    double h = 1.0 / std::sqrt(2.0);
    Povm zb = qubit_povm(m2, ketbra({1, 0}));
    Povm xb = qubit_povm(m2, ketbra({h, h}));

    SUBCASE("U = V satisfies the trivial bound") {
        Isometry u = povm_isometry(zb);
        double c = uncertainty_choi_constant(u, u);
        CHECK(c <= 1.0 + 1e-9);
    }

    SUBCASE("Z/X measurements: c <= 1/2, equality for the MUB pair") {
        Isometry u = povm_isometry(zb);
        Isometry v = povm_isometry(xb);
        double c = uncertainty_choi_constant(u, v);
        CHECK(c <= 0.5 + 1e-9);
        CHECK(c == doctest::Approx(0.5).epsilon(1e-7));
    }

    SUBCASE("random 2-outcome POVMs satisfy the overlap bound") {
        vna::rng::Counter rng(227);
        for (int t = 0; t < 20; ++t) {
            CMatrix g = vna::rng::gaussian_hermitian(rng, 2);
            auto eig = vna::linalg::herm_eig(g);
            double span = std::max(std::abs(eig.values[0]), std::abs(eig.values[1])) * 2.0 + 1e-6;
            CMatrix e0 = g;
            e0 *= cplx(1.0 / span, 0);
            e0 += cplx(0.5, 0.0) * CMatrix::identity(2);
            CMatrix f0 = vna::rng::gaussian_hermitian(rng, 2);
            auto eig2 = vna::linalg::herm_eig(f0);
            double span2 = std::max(std::abs(eig2.values[0]), std::abs(eig2.values[1])) * 2.0 + 1e-6;
            f0 *= cplx(1.0 / span2, 0);
            f0 += cplx(0.5, 0.0) * CMatrix::identity(2);
            Povm pe = qubit_povm(m2, e0);
            Povm pf = qubit_povm(m2, f0);
            double c = uncertainty_choi_constant(povm_isometry(pe), povm_isometry(pf));
            CHECK(c <= povm_overlap(pe, pf) + 1e-9);
        }
    }

    SUBCASE("non-isometry rejected") {
        Isometry bad;
        bad.n = bad.d = bad.h = 2;
        bad.m = CMatrix::zero(8, 2);
        CHECK_THROWS_AS(uncertainty_choi_constant(bad, bad), NotIsometry);
    }
}

TEST_CASE("qkd_key_bounds") {
    Algebra triv = trivial_algebra();
    Algebra bitb = classical_algebra(2);

    SUBCASE("uniform X, trivial E, perfect copy at B") {
        // X = 1 bit; B holds a copy; E trivial
        std::vector<std::string> alphabet = {"0", "1"};
        Algebra be = tensor(bitb, triv);
        std::vector<std::vector<CMatrix>> parts;
        for (int x = 0; x < 2; ++x) {
            std::vector<CMatrix> p;
            for (int y = 0; y < 2; ++y) p.push_back(scalar(x == y ? 0.5 : 0.0));
            parts.push_back(p);
        }
        CqState omega = make_cq_state(alphabet, be, parts);
        auto rep = qkd_key_bounds(omega, bitb, triv, 0.1, 0.1);
        CHECK(rep.hmin_xe >= 1.0 - 1e-6);
        CHECK(rep.hmax_xb <= 1e-5);
        double expected_log = rep.hmin_xe - rep.hmax_xb - 2.0 * std::log2(80.0 / 0.01);
        CHECK(rep.achievable_log == doctest::Approx(expected_log).epsilon(1e-9));
        CHECK(rep.achievable == 0);  // constants dominate at desk scale
        CHECK(rep.achievable_log <= rep.converse_log + 1e-6);
    }

    SUBCASE("E holds a perfect copy: no key") {
        std::vector<std::string> alphabet = {"0", "1"};
        Algebra be = tensor(triv, bitb);
        std::vector<std::vector<CMatrix>> parts;
        for (int x = 0; x < 2; ++x) {
            std::vector<CMatrix> p;
            for (int y = 0; y < 2; ++y) p.push_back(scalar(x == y ? 0.5 : 0.0));
            parts.push_back(p);
        }
        CqState omega = make_cq_state(alphabet, be, parts);
        auto rep = qkd_key_bounds(omega, triv, bitb, 0.1, 0.1);
        CHECK(rep.hmin_xe <= 0.35);  // smoothing of a fully known bit stays small
        CHECK(rep.achievable == 0);
    }
}

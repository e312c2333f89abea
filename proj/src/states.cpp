#include "vna/states.hpp"

#include <cmath>

namespace vna::states {

State::State(Algebra alg, std::vector<CMatrix> densities)
    : algebra_(std::move(alg)), densities_(std::move(densities)) {
    if (static_cast<int>(densities_.size()) != algebra_.num_blocks())
        throw ShapeMismatch("state: one density per block required");
    weight_ = 0.0;
    for (int k = 0; k < algebra_.num_blocks(); ++k) {
        const auto& d = densities_[static_cast<size_t>(k)];
        if (d.rows() != algebra_.block(k).dim || d.cols() != algebra_.block(k).dim)
            throw ShapeMismatch("state: density shape does not match block dim");
        weight_ += d.trace().real();
    }
}

cplx State::value(const AlgebraElement& a) const {
    cplx s = 0;
    for (int k = 0; k < algebra_.num_blocks(); ++k)
        s += (densities_[static_cast<size_t>(k)] * a.block_matrices[static_cast<size_t>(k)])
                 .trace();
    return s;
}

State make_state(const Algebra& alg, std::vector<CMatrix> densities, double tol) {
    for (const auto& d : densities) {
        if (!d.is_hermitian(tol)) throw NotPsd("make_state: density not Hermitian");
        auto eig = linalg::herm_eig(d, tol);
        if (!eig.values.empty() && eig.values.back() < -tol)
            throw NotPsd("make_state: density has negative eigenvalue " +
                         std::to_string(eig.values.back()));
    }
    State s(alg, std::move(densities));
    if (s.weight() > 1.0 + tol)
        throw Overweight("make_state: weight " + std::to_string(s.weight()) + " exceeds 1");
    return s;
}

double CqState::weight() const {
    double w = 0;
    for (const auto& p : parts)
        for (const auto& d : p) w += d.trace().real();
    return w;
}

double CqState::part_weight(int x) const {
    double w = 0;
    for (const auto& d : parts[static_cast<size_t>(x)]) w += d.trace().real();
    return w;
}

State CqState::assemble() const {
    Algebra x_alg = algebra::classical_algebra(static_cast<int>(alphabet.size()));
    Algebra ab = algebra::tensor(x_alg, b);
    std::vector<CMatrix> dens;
    for (const auto& p : parts)
        for (const auto& d : p) dens.push_back(d);
    return State(ab, std::move(dens));
}

CqState make_cq_state(std::vector<std::string> alphabet, const Algebra& b,
                      std::vector<std::vector<CMatrix>> parts, double tol) {
    if (alphabet.size() != parts.size())
        throw ShapeMismatch("make_cq_state: one part per alphabet symbol");
    CqState cq{std::move(alphabet), b, std::move(parts)};
    for (const auto& p : cq.parts) {
        if (static_cast<int>(p.size()) != b.num_blocks())
            throw ShapeMismatch("make_cq_state: part block count mismatch");
        for (int k = 0; k < b.num_blocks(); ++k) {
            if (p[static_cast<size_t>(k)].rows() != b.block(k).dim)
                throw ShapeMismatch("make_cq_state: part density shape mismatch");
            if (!p[static_cast<size_t>(k)].is_hermitian(tol))
                throw NotPsd("make_cq_state: part density not Hermitian");
            auto e = linalg::herm_eig(p[static_cast<size_t>(k)], tol);
            if (!e.values.empty() && e.values.back() < -tol)
                throw NotPsd("make_cq_state: part density not PSD");
        }
    }
    if (cq.weight() > 1.0 + tol) throw Overweight("make_cq_state: total weight exceeds 1");
    return cq;
}

Povm make_povm(const Algebra& alg, std::vector<std::string> outcomes,
               std::vector<AlgebraElement> elements, double tol) {
    if (outcomes.size() != elements.size()) throw NotAPovm("make_povm: outcome count mismatch");
    if (elements.empty()) throw NotAPovm("make_povm: empty POVM");
    for (const auto& e : elements) {
        if (static_cast<int>(e.block_matrices.size()) != alg.num_blocks())
            throw NotAPovm("make_povm: element block count mismatch");
        for (int k = 0; k < alg.num_blocks(); ++k) {
            const auto& m = e.block_matrices[static_cast<size_t>(k)];
            if (m.rows() != alg.block(k).dim) throw NotAPovm("make_povm: element shape mismatch");
            if (!m.is_hermitian(tol)) throw NotAPovm("make_povm: element not Hermitian");
            auto eig = linalg::herm_eig(m, tol);
            if (!eig.values.empty() && eig.values.back() < -tol)
                throw NotAPovm("make_povm: element not PSD");
        }
    }
    for (int k = 0; k < alg.num_blocks(); ++k) {
        CMatrix sum(alg.block(k).dim, alg.block(k).dim);
        for (const auto& e : elements) sum += e.block_matrices[static_cast<size_t>(k)];
        sum -= CMatrix::identity(alg.block(k).dim);
        if (sum.frobenius_norm() > tol * std::max(1.0, std::sqrt((double)alg.block(k).dim)))
            throw NotAPovm("make_povm: elements do not sum to identity");
    }
    Povm p;
    p.algebra = alg;
    p.outcomes = std::move(outcomes);
    p.elements = std::move(elements);
    return p;
}

State restrict(const State& s, const Algebra& a, const Algebra& b, Keep keep) {
    Algebra ab = algebra::tensor(a, b);
    if (!(s.algebra().num_blocks() == ab.num_blocks()))
        throw NotTensor("restrict: state does not live on tensor(a, b)");
    for (int k = 0; k < ab.num_blocks(); ++k)
        if (s.algebra().block(k).dim != ab.block(k).dim)
            throw NotTensor("restrict: block dims do not match the tensor algebra");

    if (keep == Keep::First) {
        std::vector<CMatrix> out;
        for (int i = 0; i < a.num_blocks(); ++i) out.push_back(CMatrix::zero(a.block(i).dim, a.block(i).dim));
        for (int i = 0; i < a.num_blocks(); ++i)
            for (int j = 0; j < b.num_blocks(); ++j) {
                int k = algebra::tensor_block_index(a, b, i, j);
                out[static_cast<size_t>(i)] +=
                    linalg::partial_trace(s.density(k), 0, a.block(i).dim, b.block(j).dim);
            }
        return State(a, std::move(out));
    }
    std::vector<CMatrix> out;
    for (int j = 0; j < b.num_blocks(); ++j) out.push_back(CMatrix::zero(b.block(j).dim, b.block(j).dim));
    for (int i = 0; i < a.num_blocks(); ++i)
        for (int j = 0; j < b.num_blocks(); ++j) {
            int k = algebra::tensor_block_index(a, b, i, j);
            out[static_cast<size_t>(j)] +=
                linalg::partial_trace(s.density(k), 1, a.block(i).dim, b.block(j).dim);
        }
    return State(b, std::move(out));
}

std::vector<cplx> Purification::vector() const {
    std::vector<cplx> v;
    for (const auto& t : legs)
        for (const auto& z : t.data()) v.push_back(z);
    return v;
}

double Purification::norm_squared() const {
    double s = 0;
    for (const auto& t : legs) {
        double f = t.frobenius_norm();
        s += f * f;
    }
    return s;
}

cplx Purification::relevant_value(const AlgebraElement& a) const {
    // <vec(T), (a (x) 1) vec(T)> = Tr(T^dagger a T), blockwise.
    cplx s = 0;
    for (size_t k = 0; k < legs.size(); ++k)
        s += (legs[k].adjoint() * a.block_matrices[k] * legs[k]).trace();
    return s;
}

std::vector<CMatrix> Purification::apply_relevant(const AlgebraElement& a) const {
    std::vector<CMatrix> out;
    for (size_t k = 0; k < legs.size(); ++k) out.push_back(a.block_matrices[k] * legs[k]);
    return out;
}

State Purification::relevant_state() const {
    std::vector<CMatrix> dens;
    for (const auto& t : legs) dens.push_back(t * t.adjoint());
    return State(relevant, std::move(dens));
}

State Purification::complementary_state() const {
    std::vector<CMatrix> dens;
    for (const auto& t : legs) dens.push_back((t.adjoint() * t).transpose());
    return State(complementary, std::move(dens));
}

Purification purify(const State& s) {
    Purification p;
    std::vector<algebra::Block> rel_blocks;
    for (int k = 0; k < s.algebra().num_blocks(); ++k) {
        const int n = s.algebra().block(k).dim;
        rel_blocks.push_back({n, n});
        p.legs.push_back(linalg::psd_sqrt(s.density(k)));
    }
    p.relevant = Algebra(rel_blocks, s.algebra().label() + "~std");
    p.complementary = algebra::commutant(p.relevant);
    return p;
}

Purification purify_padded(const State& s, int pad_dim) {
    Purification p;
    std::vector<algebra::Block> rel_blocks;
    for (int k = 0; k < s.algebra().num_blocks(); ++k) {
        const int n = s.algebra().block(k).dim;
        const int m = n * pad_dim;
        rel_blocks.push_back({n, m});
        CMatrix t = linalg::psd_sqrt(s.density(k));
        CMatrix tp(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) tp(i, j * pad_dim) = t(i, j);  // (x) |0>
        p.legs.push_back(tp);
    }
    p.relevant = Algebra(rel_blocks, s.algebra().label() + "~std~pad");
    p.complementary = algebra::commutant(p.relevant);
    return p;
}

RadonNikodym radon_nikodym(const State& omega, const State& sigma, const Purification& purif_sigma,
                           double tol) {
    if (omega.algebra().num_blocks() != sigma.algebra().num_blocks())
        throw AlgebraMismatch("radon_nikodym: block count mismatch");
    RadonNikodym rn;
    rn.h.algebra = &purif_sigma.complementary;
    rn.d.algebra = &purif_sigma.complementary;
    for (int k = 0; k < sigma.algebra().num_blocks(); ++k) {
        const CMatrix& w = omega.density(k);
        const CMatrix& sg = sigma.density(k);
        const CMatrix& leg = purif_sigma.legs[static_cast<size_t>(k)];
        if (w.rows() != sg.rows()) throw AlgebraMismatch("radon_nikodym: block dim mismatch");
        if (leg.rows() != leg.cols() || leg.rows() != sg.rows())
            throw AlgebraMismatch("radon_nikodym: needs the square standard-form purification");
        // Domination pre-check: support(omega) inside support(sigma).
        CMatrix p = linalg::support_projector(sg, tol);
        CMatrix ker = CMatrix::identity(w.rows()) - p;
        double leak = (ker * w * ker).trace().real();
        if (leak > 1e-9 * std::max(1.0, w.trace().real()) + 1e-12)
            throw DominationFailure("radon_nikodym: support(omega) not within support(sigma)");
        CMatrix sqrt_w = linalg::psd_sqrt(w, tol);
        CMatrix leg_pinv = linalg::psd_pow(leg * leg.adjoint(), -0.5, tol);  // (sqrt sigma)^+
        // D on block k acts as 1 (x) d with vec(X) -> vec(X d^T); D xi_sigma = xi_omega
        // forces d^T = (sqrt sigma)^+ sqrt omega.
        CMatrix d = (leg_pinv * sqrt_w).transpose();
        rn.d.block_matrices.push_back(d);
        rn.h.block_matrices.push_back(d.adjoint() * d);
    }
    return rn;
}

namespace {

// Tr_A[m (op (x) 1)] for m on C^dA (x) C^dB.
CMatrix partial_trace_first_with(const CMatrix& m, const CMatrix& op, int dA, int dB) {
    CMatrix r(dB, dB);
    for (int k = 0; k < dB; ++k)
        for (int l = 0; l < dB; ++l) {
            cplx s = 0;
            for (int i = 0; i < dA; ++i)
                for (int j = 0; j < dA; ++j) s += m(i * dB + k, j * dB + l) * op(j, i);
            r(k, l) = s;
        }
    return r;
}

}  // namespace

CqState cq_from_measurement(const State& s, const Algebra& a, const Algebra& b, const Povm& povm,
                            double tol) {
    if (povm.algebra.num_blocks() != a.num_blocks())
        throw NotAPovm("cq_from_measurement: POVM not on the first factor");
    CqState cq;
    cq.alphabet = povm.outcomes;
    cq.b = b;
    for (const auto& e : povm.elements) {
        std::vector<CMatrix> part;
        for (int j = 0; j < b.num_blocks(); ++j) part.push_back(CMatrix::zero(b.block(j).dim, b.block(j).dim));
        for (int i = 0; i < a.num_blocks(); ++i)
            for (int j = 0; j < b.num_blocks(); ++j) {
                int k = algebra::tensor_block_index(a, b, i, j);
                part[static_cast<size_t>(j)] += partial_trace_first_with(
                    s.density(k), e.block_matrices[static_cast<size_t>(i)], a.block(i).dim,
                    b.block(j).dim);
            }
        cq.parts.push_back(std::move(part));
    }
    (void)tol;
    return cq;
}

CqState cq_from_measurement_second(const State& s, const Algebra& a, const Algebra& b,
                                   const Povm& povm, double tol) {
    if (povm.algebra.num_blocks() != b.num_blocks())
        throw NotAPovm("cq_from_measurement_second: POVM not on the second factor");
    CqState cq;
    cq.alphabet = povm.outcomes;
    cq.b = a;
    for (const auto& e : povm.elements) {
        std::vector<CMatrix> part;
        for (int i = 0; i < a.num_blocks(); ++i) part.push_back(CMatrix::zero(a.block(i).dim, a.block(i).dim));
        for (int i = 0; i < a.num_blocks(); ++i)
            for (int j = 0; j < b.num_blocks(); ++j) {
                int k = algebra::tensor_block_index(a, b, i, j);
                part[static_cast<size_t>(i)] += linalg::partial_trace_with(
                    s.density(k), e.block_matrices[static_cast<size_t>(j)], a.block(i).dim,
                    b.block(j).dim);
            }
        cq.parts.push_back(std::move(part));
    }
    (void)tol;
    return cq;
}

State add_states(const State& x, const State& y) {
    if (x.algebra().num_blocks() != y.algebra().num_blocks())
        throw AlgebraMismatch("add_states: block count mismatch");
    std::vector<CMatrix> dens;
    for (int k = 0; k < x.algebra().num_blocks(); ++k) dens.push_back(x.density(k) + y.density(k));
    return State(x.algebra(), std::move(dens));
}

State scale_state(const State& x, double lambda) {
    std::vector<CMatrix> dens;
    for (int k = 0; k < x.algebra().num_blocks(); ++k) {
        CMatrix d = x.density(k);
        d *= cplx(lambda, 0);
        dens.push_back(d);
    }
    return State(x.algebra(), std::move(dens));
}

State product_state(const State& sa, const State& sb) {
    Algebra ab = algebra::tensor(sa.algebra(), sb.algebra());
    std::vector<CMatrix> dens;
    for (int i = 0; i < sa.algebra().num_blocks(); ++i)
        for (int j = 0; j < sb.algebra().num_blocks(); ++j)
            dens.push_back(linalg::kron(sa.density(i), sb.density(j)));
    return State(ab, std::move(dens));
}

}  // namespace vna::states

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vna/algebra.hpp"
#include "vna/linalg.hpp"

// Normal (sub)normalized states, cq-states, standard-form purification and
// non-commutative Radon-Nikodym derivatives.
//
// States on an algebra with multiplicities are multiplicity-collapsed: one
// density per block of size n_k, with omega(a) = sum_k Tr(rho_k a_k). The
// density absorbs the multiplicity trace, so weight = sum_k Tr(rho_k).

namespace vna::states {

using algebra::Algebra;
using algebra::AlgebraElement;
using linalg::CMatrix;
using linalg::cplx;

struct Error : linalg::Error {
    explicit Error(const std::string& msg) : linalg::Error(msg) {}
};
struct NotPsd : Error {
    explicit NotPsd(const std::string& msg) : Error(msg) {}
};
struct Overweight : Error {
    explicit Overweight(const std::string& msg) : Error(msg) {}
};
struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};
struct NotTensor : Error {
    explicit NotTensor(const std::string& msg) : Error(msg) {}
};
struct DominationFailure : Error {
    explicit DominationFailure(const std::string& msg) : Error(msg) {}
};
struct NotAPovm : Error {
    explicit NotAPovm(const std::string& msg) : Error(msg) {}
};
struct AlgebraMismatch : Error {
    explicit AlgebraMismatch(const std::string& msg) : Error(msg) {}
};

class State {
public:
    State() = default;
    State(Algebra alg, std::vector<CMatrix> densities);

    const Algebra& algebra() const { return algebra_; }
    const std::vector<CMatrix>& densities() const { return densities_; }
    const CMatrix& density(int k) const { return densities_[static_cast<size_t>(k)]; }
    double weight() const { return weight_; }
    bool normalized(double tol = 1e-9) const { return std::abs(weight_ - 1.0) <= tol; }

    /// omega(a) = sum_k Tr(rho_k a_k)
    cplx value(const AlgebraElement& a) const;

private:
    Algebra algebra_;
    std::vector<CMatrix> densities_;
    double weight_ = 0.0;
};

/// Validates PSD-ness (within tol) and weight <= 1 + tol.
State make_state(const Algebra& alg, std::vector<CMatrix> densities, double tol = 1e-9);

/// Classical-quantum state: a finite family of subnormalized B-states.
struct CqState {
    std::vector<std::string> alphabet;
    Algebra b;
    std::vector<std::vector<CMatrix>> parts;  // parts[x][k]: density on B block k

    double weight() const;
    double part_weight(int x) const;

    /// As a State on tensor(classical(|X|), b), pair blocks in (x, k) order.
    State assemble() const;
};

CqState make_cq_state(std::vector<std::string> alphabet, const Algebra& b,
                      std::vector<std::vector<CMatrix>> parts, double tol = 1e-9);

/// POVM: positive elements summing to the identity.
struct Povm {
    Algebra algebra;
    std::vector<std::string> outcomes;
    std::vector<AlgebraElement> elements;
};

Povm make_povm(const Algebra& alg, std::vector<std::string> outcomes,
               std::vector<AlgebraElement> elements, double tol = 1e-9);

enum class Keep { First, Second };

/// Restriction of a state on tensor(a, b) to one tensor factor.
State restrict(const State& s, const Algebra& a, const Algebra& b, Keep keep);

/// Standard-form purification. The Hilbert space is oplus_k C^{n_k} (x) C^{m_k}
/// (m_k = n_k for the plain standard form); vec stacks rows, the relevant
/// algebra acts on the left tensor leg and the complementary algebra (its
/// commutant) on the right leg. The vector is stored blockwise as the leg
/// matrices T_k with xi_k = vec(T_k).
struct Purification {
    std::vector<CMatrix> legs;  // T_k of shape n_k x m_k; standard form: rho_k^{1/2}
    Algebra relevant;           // blocks (n_k, m_k)
    Algebra complementary;      // blocks (m_k, n_k), the commutant

    /// Flattened vector oplus_k vec(T_k).
    std::vector<cplx> vector() const;

    double norm_squared() const;

    /// <xi| pi(a) |xi> for a in the purified algebra.
    cplx relevant_value(const AlgebraElement& a) const;

    /// pi(a) |xi| as leg matrices (a acts on the left legs).
    std::vector<CMatrix> apply_relevant(const AlgebraElement& a) const;

    /// Marginal on the relevant system (equals the purified state).
    State relevant_state() const;

    /// Marginal on the complementary system (densities are (T^dagger T)^T).
    State complementary_state() const;
};

Purification purify(const State& s);

/// Standard form tensored with an extra pure factor |0> on C^pad_dim; the
/// complementary system grows by a full matrix factor. Same restriction to
/// the relevant algebra, strictly larger environment.
Purification purify_padded(const State& s, int pad_dim = 2);

/// Non-commutative Radon-Nikodym derivative of omega with respect to sigma:
/// operators h = D*D and D in the complementary algebra of purify(sigma) with
/// D xi_sigma = xi_omega, omega(a) = <xi_sigma| h pi(a) xi_sigma> and
/// log2||h|| = Dmax(omega||sigma). Throws DominationFailure when the support
/// of omega is not contained in the support of sigma.
struct RadonNikodym {
    AlgebraElement h;  // element of purification.complementary (as abstract blocks)
    AlgebraElement d;
};

RadonNikodym radon_nikodym(const State& omega, const State& sigma, const Purification& purif_sigma,
                           double tol = 1e-9);

/// Measure the first tensor factor: parts[x](b) = s(E_x (x) b).
CqState cq_from_measurement(const State& s, const Algebra& a, const Algebra& b, const Povm& povm,
                            double tol = 1e-9);

/// Measure the second tensor factor: the cq-state over the POVM alphabet with
/// parts on a. Used by data-processing checks.
CqState cq_from_measurement_second(const State& s, const Algebra& a, const Algebra& b,
                                   const Povm& povm, double tol = 1e-9);

/// Sum of two states on the same algebra (weights add).
State add_states(const State& x, const State& y);

/// Scalar multiple (lambda >= 0).
State scale_state(const State& x, double lambda);

/// Product state on tensor(a, b).
State product_state(const State& sa, const State& sb);

}  // namespace vna::states

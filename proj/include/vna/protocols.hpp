#pragma once

#include <cstdint>
#include <vector>

#include "vna/entropy.hpp"
#include "vna/hashing.hpp"
#include "vna/metrics.hpp"

// Executes and bound-checks privacy amplification, classical data compression
// with quantum side information, key distillation and the entropic
// uncertainty relation. Family loops are embarrassingly parallel with a
// deterministic reduction order (enumeration order), capped by the
// VNA_ENTROPY_THREADS environment variable.

namespace vna::protocols {

using entropy::Conditional;
using linalg::CMatrix;
using states::CqState;
using states::Povm;
using states::State;

struct BoundViolated : linalg::Error {
    explicit BoundViolated(const std::string& msg) : linalg::Error(msg) {}
};
struct NotIsometry : linalg::Error {
    explicit NotIsometry(const std::string& msg) : linalg::Error(msg) {}
};

/// Embedding of a cq-state into M_|X| (x) M_B as a block-diagonal state; the
/// quantum-A entropies of the embedding realize the classical definitions.
Conditional embed_cq_quantum(const CqState& cq);

// ---------------------------------------------------------------------------
// privacy amplification

struct PaReport {
    double avg_distance = 0.0;  // exact E_F when enumerable, else Monte Carlo
    double stderr_mc = 0.0;     // 0 for exact runs
    bool exact = true;
    double bound = 0.0;  // sqrt(|K| 2^-Hmin^eps) (+ 4 eps when eps > 0)
    double hmin_bits = 0.0;
    double epsilon = 0.0;
    std::uint64_t key_size = 0;  // |K| = 2^b
    hashing::HashFn best_f;
    double best_distance = 0.0;
};

/// Exact (or sampled) E_F || (T_f (x) id)(omega) - e_K/|K| (x) omega_E || with
/// the two-universal hashing bound; a violated bound is a hard failure.
PaReport pa_run(const CqState& omega, int key_bits, const hashing::HashFamily& fam,
                hashing::EnumMode mode, int sample_count = 0, double eps = 0.0,
                const sdp::SolveOptions& opts = {});

struct PaKeyLength {
    std::uint64_t achievable = 0;  // |K| from the extractable-key formula
    double achievable_log = 0.0;   // Hmin^{eps/5} - 2 log(5/eps), before flooring
    double converse_log = 0.0;     // Hmin^{sqrt(eps)} cap on log |K|
    double hmin_eps5 = 0.0;
};

PaKeyLength pa_key_length(const CqState& omega, double eps, const sdp::SolveOptions& opts = {});

// ---------------------------------------------------------------------------
// data compression with quantum side information

struct DcReport {
    double avg_p_err = 0.0;  // family average, the bounded quantity
    double bound = 0.0;      // sqrt(2^{Hmax+3} / |C|)
    double hmax_bits = 0.0;
    std::uint64_t message_size = 0;  // |C| = 2^b
    hashing::HashFn encoder;         // best family member
    double p_err = 0.0;              // error probability of the best member
    std::vector<Povm> decoder;       // PGM decoder per message, for the best f
};

/// Builds the pretty-good-measurement decoder for every family member,
/// averages the error probability and asserts the compression bound.
DcReport dc_build(const CqState& omega, const hashing::HashFamily& fam, hashing::EnumMode mode,
                  int sample_count = 0, const sdp::SolveOptions& opts = {});

struct DcMessageLength {
    std::uint64_t message_size = 0;  // |C| from the one-shot formula
    double message_log = 0.0;        // Hmax^{eps/2} + 2 log(1/eps) + 6
    double converse_log = 0.0;       // Hmax^{sqrt(2 eps)} lower bound on log |C|
    double hmax_eps2 = 0.0;
};

DcMessageLength dc_message_length(const CqState& omega, double eps,
                                  const sdp::SolveOptions& opts = {});

// ---------------------------------------------------------------------------
// uncertainty relation

struct UncertaintyReport {
    double lhs = 0.0;  // Hmin^eps(X|B) + Hmax^eps(Y|C)
    double rhs = 0.0;  // -log c
    double overlap_c = 0.0;
    double hmin_xb = 0.0;
    double hmax_yc = 0.0;
    bool holds = false;
};

/// Measures povm_x / povm_y on the A factor of a tripartite state and checks
/// Hmin^eps(X|B) + Hmax^eps(Y|C) >= -log max_xy ||sqrt(E_x) sqrt(F_y)||^2.
UncertaintyReport uncertainty_check(const State& omega_abc, const algebra::Algebra& a,
                                    const algebra::Algebra& b, const algebra::Algebra& c,
                                    const Povm& povm_x, const Povm& povm_y, double eps,
                                    const sdp::SolveOptions& opts = {});

/// Stinespring isometry V: C^h -> C^n (x) C^d (x) C^h stored as a matrix.
struct Isometry {
    CMatrix m;  // (n*d*h) x h
    int n = 0, d = 0, h = 0;
};

/// V|psi> = sum_x sqrt(E_x)|psi> |x> |x> for a POVM on a full matrix algebra.
Isometry povm_isometry(const Povm& povm);

/// c(U V*) = || sum_kl |k><l| (x) T_{UV*}(|k><l|) ||, the Choi-matrix norm of
/// the uncertainty relation.
double uncertainty_choi_constant(const Isometry& u, const Isometry& v, double tol = 1e-9);

/// max_xy || sqrt(E_x) sqrt(F_y) ||^2 for two POVMs on the same algebra.
double povm_overlap(const Povm& x, const Povm& y);

// ---------------------------------------------------------------------------
// key distillation

struct QkdReport {
    std::uint64_t achievable = 0;
    double achievable_log = 0.0;  // identity-preprocessing exponent
    double converse_log = 0.0;
    double hmin_xe = 0.0;  // Hmin^{eps1/5}(X|E)
    double hmax_xb = 0.0;  // Hmax^{eps2/4}(X|B)
};

/// Identity-preprocessing achievable and converse key lengths for a
/// tripartite cq-state over (X, B (x) E).
QkdReport qkd_key_bounds(const CqState& omega_x_be, const algebra::Algebra& b,
                         const algebra::Algebra& e, double eps1, double eps2,
                         const sdp::SolveOptions& opts = {});

/// Restrictions of the (X, B (x) E) cq-state to one quantum factor.
CqState cq_restrict(const CqState& omega_x_be, const algebra::Algebra& b,
                    const algebra::Algebra& e, states::Keep keep);

}  // namespace vna::protocols

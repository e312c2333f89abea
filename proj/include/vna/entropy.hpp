#pragma once

#include <optional>
#include <vector>

#include "vna/sdp.hpp"
#include "vna/states.hpp"

// Max-relative entropy, conditional min/max entropies, guessing probability
// and their smoothed variants. All values are in bits (log base 2) and the
// A-side reference functional is the UNNORMALIZED trace on M_n, so e.g. a
// normalized product state tau_A/n (x) sigma_B has Hmin(A|B) = log n.

namespace vna::entropy {

using algebra::Algebra;
using linalg::CMatrix;
using states::CqState;
using states::State;

struct CrossCheckFailure : linalg::Error {
    explicit CrossCheckFailure(const std::string& msg) : linalg::Error(msg) {}
};

/// Conditional state in cell form: the A side is a direct sum of full matrix
/// blocks, each cell ties one A block to one conditioning (B) block and holds
/// the joint density on C^{a_dim} (x) C^{n_b}. Quantum A = one cell per B
/// block; classical X = |X| cells per B block; the purification complement
/// ties each cell to its own environment block.
struct Conditional {
    struct Cell {
        int a_dim;
        int b_idx;
        CMatrix density;  // (a_dim * b_dim) x (a_dim * b_dim)
    };
    std::vector<int> b_dims;  // conditioning algebra, multiplicity-collapsed
    std::vector<Cell> cells;

    double weight() const;

    /// State on tensor(a, b) with A-side blocks of multiplicity one.
    static Conditional from_state(const State& s, const Algebra& a, const Algebra& b);
    static Conditional from_cq(const CqState& cq);
};

/// Conditional state on (A | C) obtained from the standard-form purification
/// of the cell state: C = oplus_cells M_{D_cell} and the densities come from
/// the contraction of the purification legs. pad_dim > 1 tensors each leg
/// with an extra pure factor, growing the environment (same entropies by
/// purification independence).
Conditional purified_complement(const Conditional& c, int pad_dim = 1);

struct EntropyResult {
    double value = 0.0;  // bits (pguess: a probability)
    double lo = 0.0;     // certified bracket from the SDP primal/dual pair
    double hi = 0.0;
    double gap = 0.0;
    double eps = 0.0;
    int iterations = 0;
    /// Optimal conditioning functional sigma_B (densities per b block).
    std::optional<std::vector<CMatrix>> sigma;
    /// Optimal dual (M_ij) per cell (hmin), normalized to sum_i M_ii = 1.
    std::optional<std::vector<CMatrix>> dual_povm;
    /// Optimal smoothed state (densities per cell).
    std::optional<std::vector<CMatrix>> smoothed;
    /// Optimal guessing POVM (pguess): per outcome, per b block.
    std::optional<std::vector<std::vector<CMatrix>>> povm;
};

/// Dmax(omega || sigma) = log lambda_max(sigma^{-1/2} omega sigma^{-1/2});
/// +infinity when support(omega) is not inside support(sigma), -infinity for
/// omega = 0.
double dmax(const State& omega, const State& sigma, double tol = 1e-9);

/// Hmin(A|B) = -log inf { sigma_B(1) : tau_A (x) sigma_B >= omega_AB }.
EntropyResult hmin(const Conditional& c, const sdp::SolveOptions& opts = {});

/// Guessing probability of a cq-state; value is the probability. The result
/// is cross-checked against hmin of the assembled cq state (mandatory).
EntropyResult pguess(const CqState& cq, const sdp::SolveOptions& opts = {});

/// Hmax(A|B) = -Hmin(A|C) over the standard-form purification; cross-checked
/// against the direct fidelity maximization sup_sigma F(omega, tau (x) sigma)
/// (both routes must agree within 1e-6).
EntropyResult hmax(const Conditional& c, const sdp::SolveOptions& opts = {});

/// The fidelity-maximization route alone: 2^Hmax = sup_sigma F(w, tau (x) s).
EntropyResult hmax_fidelity_route(const Conditional& c, const sdp::SolveOptions& opts = {});

/// The duality route alone, through the (optionally padded) purification.
EntropyResult hmax_duality_route(const Conditional& c, int pad_dim = 1,
                                 const sdp::SolveOptions& opts = {});

/// Smooth min-entropy: one joint SDP over the smoothed state, the
/// conditioning functional and a fidelity certificate. The ball is in
/// purified distance over subnormalized states; normalized_ball restricts to
/// normalized smoothed states (comparison variant, not the paper ball).
EntropyResult hmin_smooth(const Conditional& c, double eps, const sdp::SolveOptions& opts = {},
                          bool normalized_ball = false);

/// Smooth max-entropy via duality: -Hmin^eps(A|C) on the purification
/// complement.
EntropyResult hmax_smooth(const Conditional& c, double eps, const sdp::SolveOptions& opts = {});

/// Dual-certificate evaluation sum_ij omega^ij(M_ij) = sum_cells Tr(R M).
double dual_povm_value(const Conditional& c, const std::vector<CMatrix>& m);

/// Channel-fidelity form of Thm's operational min-entropy: builds the output
/// state of the measurement channel E_M on AA' and returns the overlap with
/// the unnormalized maximally entangled vector. Requires a single A block of
/// dimension n across all cells.
double channel_fidelity_value(const Conditional& c, const std::vector<CMatrix>& m);

}  // namespace vna::entropy

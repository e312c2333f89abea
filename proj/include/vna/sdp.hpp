#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vna/linalg.hpp"

// Self-contained solver for small complex Hermitian semidefinite programs.
//
// Problems are stated over complex matrix variables (Hermitian or general)
// with affine Hermitian LMI constraints, real-linear equalities and a
// real-linear objective. Internally every Hermitian datum is embedded into
// real symmetric form via [[Re, -Im], [Im, Re]] and the resulting cone
// program is solved by a primal-dual interior point method with
// Nesterov-Todd scaling. Values are unchanged by the embedding and PSD-ness
// is preserved, so one real cone solver serves all problems.

namespace vna::sdp {

using linalg::CMatrix;
using linalg::cplx;

struct IllFormed : linalg::Error {
    explicit IllFormed(const std::string& msg) : linalg::Error(msg) {}
};

enum class Status { Optimal, Infeasible, Unbounded, MaxIter };
enum class Sense { Min, Max };
enum class VarKind { Hermitian, ComplexGeneral };

std::string to_string(Status s);

struct SolveOptions {
    double gap_tol = 1e-8;
    double feas_tol = 1e-8;
    int max_iter = 500;
};

struct Solution {
    Status status = Status::MaxIter;
    Sense sense = Sense::Min;
    /// Objective value achieved by the returned variable assignment.
    double primal_value = 0.0;
    /// Certified bound from the other side of the duality; on Optimal the
    /// two values bracket the optimum with |gap| <= gap_tol.
    double dual_value = 0.0;
    double gap = 0.0;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    std::vector<CMatrix> variables;  // one complex matrix per declared variable
    std::vector<CMatrix> lmi_duals;  // PSD multiplier per LMI block

    /// Certified bracket [lo, hi] containing the optimum.
    double value_lo() const;
    double value_hi() const;
};

/// LMI and equality constraints are built entry-wise; entries are given for
/// r <= c only and the (c, r) mirror is implied by Hermiticity.
class Problem {
public:
    int add_hermitian_var(const std::string& name, int dim);
    int add_complex_var(const std::string& name, int rows, int cols);
    int add_complex_var(const std::string& name, int dim) { return add_complex_var(name, dim, dim); }

    int num_vars() const { return static_cast<int>(vars_.size()); }

    /// New LMI block G >= 0 of the given complex dimension; returns its id.
    int add_lmi(int dim);
    /// G(r,c) += value (constant term), r <= c.
    void lmi_const(int lmi, int r, int c, cplx value);
    /// G(r,c) += mult * X_var(vr, vc), r <= c.
    void lmi_term(int lmi, int r, int c, int var, int vr, int vc, cplx mult);
    /// G(r,c) += mult * conj(X_var(vr, vc)), r <= c.
    void lmi_term_conj(int lmi, int r, int c, int var, int vr, int vc, cplx mult);

    /// New equality constraint (real-linear functional of variables = rhs).
    int add_eq(double rhs);
    /// eq += mult * Re X_var(vr, vc)
    void eq_re(int eq, int var, int vr, int vc, double mult);
    /// eq += mult * Im X_var(vr, vc)
    void eq_im(int eq, int var, int vr, int vc, double mult);
    /// eq += Re(coeff * X_var(vr, vc))
    void eq_term(int eq, int var, int vr, int vc, cplx coeff);

    void set_sense(Sense s) { sense_ = s; }
    /// objective += mult * Re X_var(vr, vc)
    void obj_re(int var, int vr, int vc, double mult);
    /// objective += Re(coeff * X_var(vr, vc))
    void obj_term(int var, int vr, int vc, cplx coeff);
    void obj_const(double v) { obj_const_ += v; }
    /// objective += mult * Tr X_var
    void obj_trace(int var, double mult);

    Solution solve(const SolveOptions& opts = {}) const;

    std::string to_json() const;
    static Problem from_json(const std::string& text);

private:
    friend struct Compiler;

    struct Var {
        std::string name;
        int rows, cols;  // Hermitian: rows == cols
        VarKind kind;
        int param_offset;  // first scalar parameter index
    };
    // coeff * param appears at entry (r, c) [r <= c] of an LMI.
    struct LmiTerm {
        int r, c;
        int param;
        cplx coeff;
    };
    struct Lmi {
        int dim;
        std::vector<LmiTerm> terms;
        std::vector<LmiTerm> const_terms;  // param = -1, coeff carries the value
    };
    struct EqTerm {
        int param;
        double coeff;
    };
    struct Eq {
        double rhs;
        std::vector<EqTerm> terms;
    };

    // Decomposes X_var(vr, vc) (or its conjugate) into real scalar parameters.
    std::vector<std::pair<int, cplx>> entry_params(int var, int vr, int vc, bool conj) const;

    std::vector<CMatrix> reconstruct_vars(const std::vector<double>& y) const;

    std::vector<Var> vars_;
    std::vector<Lmi> lmis_;
    std::vector<Eq> eqs_;
    std::vector<EqTerm> obj_;
    double obj_const_ = 0.0;
    Sense sense_ = Sense::Min;
    int num_params_ = 0;
};

}  // namespace vna::sdp

#include "vna/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace vna::sdp {

std::string to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::MaxIter: return "max_iter";
    }
    return "?";
}

double Solution::value_lo() const {
    return std::min(primal_value, dual_value);
}
double Solution::value_hi() const {
    return std::max(primal_value, dual_value);
}

int Problem::add_hermitian_var(const std::string& name, int dim) {
    if (dim < 1) throw IllFormed("add_hermitian_var: dim < 1");
    Var v{name, dim, dim, VarKind::Hermitian, num_params_};
    num_params_ += dim * dim;
    vars_.push_back(v);
    return static_cast<int>(vars_.size()) - 1;
}

int Problem::add_complex_var(const std::string& name, int rows, int cols) {
    if (rows < 1 || cols < 1) throw IllFormed("add_complex_var: dims < 1");
    Var v{name, rows, cols, VarKind::ComplexGeneral, num_params_};
    num_params_ += 2 * rows * cols;
    vars_.push_back(v);
    return static_cast<int>(vars_.size()) - 1;
}

// Hermitian var of dim n: for i < j the pair (re, im) is stored at
// offset + i*n + j (re) and offset + j*n + i (im); the diagonal at
// offset + i*n + i. Complex var: re at offset + 2*(i*n+j), im next.
std::vector<std::pair<int, cplx>> Problem::entry_params(int var, int vr, int vc, bool conj) const {
    const Var& v = vars_[static_cast<size_t>(var)];
    const int n = v.cols;
    if (vr < 0 || vc < 0 || vr >= v.rows || vc >= v.cols)
        throw IllFormed("entry reference out of range");
    std::vector<std::pair<int, cplx>> out;
    const cplx i_unit = conj ? cplx(0, -1) : cplx(0, 1);
    if (v.kind == VarKind::Hermitian) {
        if (vr == vc) {
            out.emplace_back(v.param_offset + vr * n + vr, cplx(1, 0));
        } else if (vr < vc) {
            out.emplace_back(v.param_offset + vr * n + vc, cplx(1, 0));
            out.emplace_back(v.param_offset + vc * n + vr, i_unit);
        } else {
            // X(vr,vc) = conj(X(vc,vr))
            out.emplace_back(v.param_offset + vc * n + vr, cplx(1, 0));
            out.emplace_back(v.param_offset + vr * n + vc, -i_unit);
        }
    } else {
        out.emplace_back(v.param_offset + 2 * (vr * n + vc), cplx(1, 0));
        out.emplace_back(v.param_offset + 2 * (vr * n + vc) + 1, i_unit);
    }
    return out;
}

int Problem::add_lmi(int dim) {
    if (dim < 1) throw IllFormed("add_lmi: dim < 1");
    lmis_.push_back(Lmi{dim, {}, {}});
    return static_cast<int>(lmis_.size()) - 1;
}

void Problem::lmi_const(int lmi, int r, int c, cplx value) {
    if (r > c) throw IllFormed("lmi_const: give entries with r <= c");
    lmis_[static_cast<size_t>(lmi)].const_terms.push_back({r, c, -1, value});
}

void Problem::lmi_term(int lmi, int r, int c, int var, int vr, int vc, cplx mult) {
    if (r > c) throw IllFormed("lmi_term: give entries with r <= c");
    for (auto [p, co] : entry_params(var, vr, vc, false))
        lmis_[static_cast<size_t>(lmi)].terms.push_back({r, c, p, mult * co});
}

void Problem::lmi_term_conj(int lmi, int r, int c, int var, int vr, int vc, cplx mult) {
    if (r > c) throw IllFormed("lmi_term_conj: give entries with r <= c");
    for (auto [p, co] : entry_params(var, vr, vc, true))
        lmis_[static_cast<size_t>(lmi)].terms.push_back({r, c, p, mult * co});
}

int Problem::add_eq(double rhs) {
    eqs_.push_back(Eq{rhs, {}});
    return static_cast<int>(eqs_.size()) - 1;
}

void Problem::eq_re(int eq, int var, int vr, int vc, double mult) {
    for (auto [p, co] : entry_params(var, vr, vc, false)) {
        double w = mult * co.real();
        if (w != 0.0) eqs_[static_cast<size_t>(eq)].terms.push_back({p, w});
    }
}

void Problem::eq_im(int eq, int var, int vr, int vc, double mult) {
    for (auto [p, co] : entry_params(var, vr, vc, false)) {
        double w = mult * co.imag();
        if (w != 0.0) eqs_[static_cast<size_t>(eq)].terms.push_back({p, w});
    }
}

void Problem::eq_term(int eq, int var, int vr, int vc, cplx coeff) {
    // Re(coeff * X(vr,vc)) with X(vr,vc) = sum co_p * param_p
    for (auto [p, co] : entry_params(var, vr, vc, false)) {
        double w = (coeff * co).real();
        if (w != 0.0) eqs_[static_cast<size_t>(eq)].terms.push_back({p, w});
    }
}

void Problem::obj_re(int var, int vr, int vc, double mult) {
    for (auto [p, co] : entry_params(var, vr, vc, false)) {
        double w = mult * co.real();
        if (w != 0.0) obj_.push_back({p, w});
    }
}

void Problem::obj_term(int var, int vr, int vc, cplx coeff) {
    for (auto [p, co] : entry_params(var, vr, vc, false)) {
        double w = (coeff * co).real();
        if (w != 0.0) obj_.push_back({p, w});
    }
}

void Problem::obj_trace(int var, double mult) {
    const auto& v = vars_[static_cast<size_t>(var)];
    for (int i = 0; i < std::min(v.rows, v.cols); ++i) obj_re(var, i, i, mult);
}

// ---------------------------------------------------------------------------
// dense real symmetric helpers (row-major, dimension d)

namespace {

using Vec = std::vector<double>;

struct Dense {
    int d = 0;
    Vec a;
    explicit Dense(int dim = 0) : d(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}
    double& at(int r, int c) { return a[static_cast<size_t>(r) * d + c]; }
    double at(int r, int c) const { return a[static_cast<size_t>(r) * d + c]; }
    static Dense eye(int dim, double s = 1.0) {
        Dense m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = s;
        return m;
    }
    void axpy(double s, const Dense& o) {
        for (size_t k = 0; k < a.size(); ++k) a[k] += s * o.a[k];
    }
    double fnorm() const {
        double s = 0;
        for (double v : a) s += v * v;
        return std::sqrt(s);
    }
};

Dense matmul(const Dense& x, const Dense& y) {
    Dense r(x.d);
    for (int i = 0; i < x.d; ++i)
        for (int k = 0; k < x.d; ++k) {
            double v = x.at(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < x.d; ++j) r.at(i, j) += v * y.at(k, j);
        }
    return r;
}

double dot_dense(const Dense& x, const Dense& y) {
    double s = 0;
    for (size_t k = 0; k < x.a.size(); ++k) s += x.a[k] * y.a[k];
    return s;
}

// Lower-triangular Cholesky; returns false on a non-positive pivot.
bool chol(const Dense& m, Dense& l) {
    const int d = m.d;
    l = Dense(d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = m.at(i, j);
            for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) return false;
                l.at(i, i) = std::sqrt(s);
            } else {
                l.at(i, j) = s / l.at(j, j);
            }
        }
    }
    return true;
}

// Solve L y = b in place (lower triangular).
void trisolve_lower(const Dense& l, Vec& b) {
    const int d = l.d;
    for (int i = 0; i < d; ++i) {
        double s = b[static_cast<size_t>(i)];
        for (int k = 0; k < i; ++k) s -= l.at(i, k) * b[static_cast<size_t>(k)];
        b[static_cast<size_t>(i)] = s / l.at(i, i);
    }
}

// Solve L^T y = b in place.
void trisolve_upperT(const Dense& l, Vec& b) {
    const int d = l.d;
    for (int i = d - 1; i >= 0; --i) {
        double s = b[static_cast<size_t>(i)];
        for (int k = i + 1; k < d; ++k) s -= l.at(k, i) * b[static_cast<size_t>(k)];
        b[static_cast<size_t>(i)] = s / l.at(i, i);
    }
}

// B = L^{-1} A L^{-T} for symmetric A.
Dense congruence_inv(const Dense& l, const Dense& a) {
    const int d = l.d;
    // First solve L Y = A  (columns), then (L Z^T = Y^T) ...
    Dense y = a;
    // columns of y: solve L * col = col
    for (int c = 0; c < d; ++c) {
        Vec col(d);
        for (int r = 0; r < d; ++r) col[static_cast<size_t>(r)] = y.at(r, c);
        trisolve_lower(l, col);
        for (int r = 0; r < d; ++r) y.at(r, c) = col[static_cast<size_t>(r)];
    }
    // now B = Y L^{-T}: solve rows: B L^T = Y -> for each row, L B_row = Y_row
    Dense b(d);
    for (int r = 0; r < d; ++r) {
        Vec row(d);
        for (int c = 0; c < d; ++c) row[static_cast<size_t>(c)] = y.at(r, c);
        trisolve_lower(l, row);
        for (int c = 0; c < d; ++c) b.at(r, c) = row[static_cast<size_t>(c)];
    }
    return b;
}

// Cyclic Jacobi for real symmetric matrices; eigenvalues ascending not needed,
// we only need values + optional vectors.
void sym_eig(const Dense& m, Vec& values, Dense* vectors) {
    const int n = m.d;
    Dense a = m;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = 0.5 * (a.at(i, j) + a.at(j, i));
            a.at(i, j) = v;
            a.at(j, i) = v;
        }
    Dense v = Dense::eye(n);
    double fn = std::max(a.fnorm(), 1e-300);
    auto offmass = [&]() {
        double s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += a.at(i, j) * a.at(i, j);
        return std::sqrt(s);
    };
    int sweeps = 0;
    while (offmass() > 1e-14 * fn && sweeps < 60) {
        ++sweeps;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = a.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double tau = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                double t = (tau >= 0) ? 1.0 / (tau + std::sqrt(1 + tau * tau))
                                      : -1.0 / (-tau + std::sqrt(1 + tau * tau));
                double c = 1.0 / std::sqrt(1 + t * t);
                double s = t * c;
                for (int i = 0; i < n; ++i) {
                    double aip = a.at(i, p), aiq = a.at(i, q);
                    a.at(i, p) = c * aip - s * aiq;
                    a.at(i, q) = s * aip + c * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    double apj = a.at(p, j), aqj = a.at(q, j);
                    a.at(p, j) = c * apj - s * aqj;
                    a.at(q, j) = s * apj + c * aqj;
                }
                if (vectors)
                    for (int i = 0; i < n; ++i) {
                        double vip = v.at(i, p), viq = v.at(i, q);
                        v.at(i, p) = c * vip - s * viq;
                        v.at(i, q) = s * vip + c * viq;
                    }
                a.at(p, q) = 0;
                a.at(q, p) = 0;
            }
    }
    values.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) values[static_cast<size_t>(i)] = a.at(i, i);
    if (vectors) *vectors = v;
}

double min_eig(const Dense& m) {
    Vec vals;
    sym_eig(m, vals, nullptr);
    double lo = vals.empty() ? 0.0 : vals[0];
    for (double v : vals) lo = std::min(lo, v);
    return lo;
}

struct SparseEnt {
    int blk, r, c;  // r <= c
    double v;
};

// <A, X> with symmetric upper-tri sparse A and dense symmetric X blocks.
double sparse_inner(const std::vector<SparseEnt>& a, const std::vector<Dense>& x) {
    double s = 0;
    for (const auto& e : a) {
        double xv = x[static_cast<size_t>(e.blk)].at(e.r, e.c);
        s += (e.r == e.c) ? e.v * xv : 2.0 * e.v * xv;
    }
    return s;
}

struct RealProblem {
    std::vector<int> bdims;
    std::vector<Dense> C;                     // per block
    std::vector<std::vector<SparseEnt>> A;    // per parameter
    Vec b;                                    // maximize b^T z
};

struct RealResult {
    Status status = Status::MaxIter;
    Vec y;
    std::vector<Dense> X;  // primal blocks
    double pobj = 0, dobj = 0;
    double pres = 0, dres = 0;
    int iterations = 0;
};

// max b^T y  s.t.  C - sum_p y_p A_p >= 0 (dual form), with the primal
// min <C,X> s.t. <A_p, X> = -b_p ... solved as the standard pair:
//   (P) min <C,X> s.t. <Ahat_p, X> = b_p, X >= 0   with Ahat_p = -A_p
//   (D) max b^T y s.t. sum_p y_p Ahat_p + Z = C.
RealResult solve_real(const RealProblem& rp, const SolveOptions& opts) {
    const int m = static_cast<int>(rp.b.size());
    const int nb = static_cast<int>(rp.bdims.size());
    RealResult res;
    res.y.assign(static_cast<size_t>(m), 0.0);

    // Ahat_p = -A_p so that (D) reads max b^T y, C - sum y A >= 0.
    auto Ahat = rp.A;
    for (auto& lst : Ahat)
        for (auto& e : lst) e.v = -e.v;

    int N = 0;
    for (int d : rp.bdims) N += d;

    double normC = 0;
    for (const auto& c : rp.C) normC = std::max(normC, c.fnorm());
    double normb = 0;
    for (double v : rp.b) normb = std::max(normb, std::abs(v));
    double maxA = 1e-12;
    for (const auto& lst : Ahat) {
        double f = 0;
        for (const auto& e : lst) f += e.v * e.v * (e.r == e.c ? 1 : 2);
        maxA = std::max(maxA, std::sqrt(f));
    }

    std::vector<Dense> X, Z;
    double init_p = std::max({10.0, std::sqrt((double)N), (1.0 + normb) / (1.0 + maxA) * std::sqrt((double)N)});
    double init_d = std::max({10.0, std::sqrt((double)N), normC, maxA});
    for (int d : rp.bdims) {
        X.push_back(Dense::eye(d, init_p));
        Z.push_back(Dense::eye(d, init_d));
    }

    std::vector<Dense> Rd(static_cast<size_t>(nb));
    Vec rpv(static_cast<size_t>(m));

    auto best = res;
    double best_score = 1e300;

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        // residuals
        double pobj = 0, dobj = 0;
        for (int bk = 0; bk < nb; ++bk) pobj += dot_dense(rp.C[static_cast<size_t>(bk)], X[static_cast<size_t>(bk)]);
        for (int p = 0; p < m; ++p) dobj += rp.b[static_cast<size_t>(p)] * res.y[static_cast<size_t>(p)];

        for (int bk = 0; bk < nb; ++bk) {
            Rd[static_cast<size_t>(bk)] = rp.C[static_cast<size_t>(bk)];
            Rd[static_cast<size_t>(bk)].axpy(-1.0, Z[static_cast<size_t>(bk)]);
        }
        for (int p = 0; p < m; ++p) {
            double yp = res.y[static_cast<size_t>(p)];
            if (yp == 0.0) continue;
            for (const auto& e : Ahat[static_cast<size_t>(p)]) {
                Rd[static_cast<size_t>(e.blk)].at(e.r, e.c) -= yp * e.v;
                if (e.r != e.c) Rd[static_cast<size_t>(e.blk)].at(e.c, e.r) -= yp * e.v;
            }
        }
        double dres = 0;
        for (const auto& r : Rd) dres = std::max(dres, r.fnorm());
        dres /= (1.0 + normC);

        double pres = 0;
        for (int p = 0; p < m; ++p) {
            rpv[static_cast<size_t>(p)] =
                rp.b[static_cast<size_t>(p)] - sparse_inner(Ahat[static_cast<size_t>(p)], X);
            pres += rpv[static_cast<size_t>(p)] * rpv[static_cast<size_t>(p)];
        }
        pres = std::sqrt(pres) / (1.0 + normb);

        double mu = 0;
        for (int bk = 0; bk < nb; ++bk) mu += dot_dense(X[static_cast<size_t>(bk)], Z[static_cast<size_t>(bk)]);
        mu /= std::max(1, N);

        double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        res.pobj = pobj;
        res.dobj = dobj;
        res.pres = pres;
        res.dres = dres;
        res.iterations = iter - 1;
        res.X = X;

        double score = relgap + pres + dres;
        if (score < best_score) {
            best_score = score;
            best = res;
        }

        if (relgap <= opts.gap_tol && pres <= opts.feas_tol && dres <= opts.feas_tol) {
            res.status = Status::Optimal;
            return res;
        }
        // Divergence heuristics: certify infeasibility/unboundedness by iterate blowup.
        double xnorm = 0, ynorm = 0;
        for (const auto& x : X) xnorm = std::max(xnorm, x.fnorm());
        for (double v : res.y) ynorm = std::max(ynorm, std::abs(v));
        if (ynorm > 1e14 || xnorm > 1e16) {
            res.status = (ynorm > 1e14) ? Status::Infeasible : Status::Unbounded;
            return res;
        }

        // NT scaling per block.
        std::vector<Dense> W(static_cast<size_t>(nb)), Zinv(static_cast<size_t>(nb));
        bool scale_ok = true;
        for (int bk = 0; bk < nb; ++bk) {
            const int d = rp.bdims[static_cast<size_t>(bk)];
            Dense Lx, Lz;
            Dense Xb = X[static_cast<size_t>(bk)];
            Dense Zb = Z[static_cast<size_t>(bk)];
            if (!chol(Xb, Lx)) {
                double tr = 0;
                for (int i = 0; i < d; ++i) tr += Xb.at(i, i);
                for (int i = 0; i < d; ++i) Xb.at(i, i) += 1e-13 * (1.0 + tr);
                if (!chol(Xb, Lx)) { scale_ok = false; break; }
            }
            if (!chol(Zb, Lz)) {
                double tr = 0;
                for (int i = 0; i < d; ++i) tr += Zb.at(i, i);
                for (int i = 0; i < d; ++i) Zb.at(i, i) += 1e-13 * (1.0 + tr);
                if (!chol(Zb, Lz)) { scale_ok = false; break; }
            }
            // R = Lz^T Lx, eig of R^T R
            Dense R(d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double s = 0;
                    for (int k = std::max(i, j); k < d; ++k) s += Lz.at(k, i) * Lx.at(k, j);
                    R.at(i, j) = s;  // note Lz^T(i,k) = Lz(k,i), Lx(k,j) lower
                }
            Dense RtR(d);
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) {
                    double s = 0;
                    for (int k = 0; k < d; ++k) s += R.at(k, i) * R.at(k, j);
                    RtR.at(i, j) = s;
                    RtR.at(j, i) = s;
                }
            Vec sig2;
            Dense V;
            sym_eig(RtR, sig2, &V);
            // G = Lx V diag(sig^{-1/2}); W = G G^T; Lx lower triangular so
            // G(i,j) = sum_{k<=i} Lx(i,k) V(k,j) * sig2_j^{-1/4}.
            Dense G(d);
            for (int j = 0; j < d; ++j) {
                double w = std::pow(std::max(sig2[static_cast<size_t>(j)], 1e-300), -0.25);
                for (int i = 0; i < d; ++i) {
                    double s = 0;
                    for (int k = 0; k <= i; ++k) s += Lx.at(i, k) * V.at(k, j);
                    G.at(i, j) = s * w;
                }
            }
            Dense Wb(d);
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) {
                    double s = 0;
                    for (int k = 0; k < d; ++k) s += G.at(i, k) * G.at(j, k);
                    Wb.at(i, j) = s;
                    Wb.at(j, i) = s;
                }
            W[static_cast<size_t>(bk)] = Wb;
            // Z^{-1} = Lz^{-T} Lz^{-1}: solve Z w = e_i column by column.
            Dense Iz(d);
            for (int c = 0; c < d; ++c) {
                Vec col(static_cast<size_t>(d), 0.0);
                col[static_cast<size_t>(c)] = 1.0;
                trisolve_lower(Lz, col);
                trisolve_upperT(Lz, col);
                for (int r = 0; r < d; ++r) Iz.at(r, c) = col[static_cast<size_t>(r)];
            }
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j) {
                    double s = 0.5 * (Iz.at(i, j) + Iz.at(j, i));
                    Iz.at(i, j) = s;
                    Iz.at(j, i) = s;
                }
            Zinv[static_cast<size_t>(bk)] = Iz;
        }
        if (!scale_ok) {
            res.status = Status::MaxIter;
            break;
        }

        // Schur complement M_pq = <Ahat_p, W Ahat_q W>.
        Dense M(m);
        {
            for (int q = 0; q < m; ++q) {
                // S_q = W Ahat_q W per touched block
                std::vector<int> touched;
                std::vector<Dense> Sq(static_cast<size_t>(nb));
                std::vector<char> have(static_cast<size_t>(nb), 0);
                for (const auto& e : Ahat[static_cast<size_t>(q)]) {
                    const int bk = e.blk;
                    const Dense& Wb = W[static_cast<size_t>(bk)];
                    const int d = Wb.d;
                    if (!have[static_cast<size_t>(bk)]) {
                        have[static_cast<size_t>(bk)] = 1;
                        Sq[static_cast<size_t>(bk)] = Dense(d);
                        touched.push_back(bk);
                    }
                    Dense& S = Sq[static_cast<size_t>(bk)];
                    // v * (W e_r e_c^T W + W e_c e_r^T W) [once if r==c]
                    for (int i = 0; i < d; ++i) {
                        double wir = Wb.at(i, e.r) * e.v;
                        double wic = Wb.at(i, e.c) * e.v;
                        for (int j = 0; j < d; ++j) {
                            double add = wir * Wb.at(e.c, j);
                            if (e.r != e.c) add += wic * Wb.at(e.r, j);
                            S.at(i, j) += add;
                        }
                    }
                }
                for (int p = 0; p < m; ++p) {
                    double s = 0;
                    for (const auto& e : Ahat[static_cast<size_t>(p)]) {
                        if (!have[static_cast<size_t>(e.blk)]) continue;
                        double sv = Sq[static_cast<size_t>(e.blk)].at(e.r, e.c);
                        s += (e.r == e.c) ? e.v * sv : 2.0 * e.v * sv;
                    }
                    M.at(p, q) = s;
                }
            }
            for (int p = 0; p < m; ++p)
                for (int q = p + 1; q < m; ++q) {
                    double s = 0.5 * (M.at(p, q) + M.at(q, p));
                    M.at(p, q) = s;
                    M.at(q, p) = s;
                }
        }
        Dense LM;
        {
            double jitter = 0.0;
            double trM = 0;
            for (int i = 0; i < m; ++i) trM += M.at(i, i);
            for (int tries = 0; tries < 8; ++tries) {
                Dense Mj = M;
                if (jitter > 0)
                    for (int i = 0; i < m; ++i) Mj.at(i, i) += jitter;
                if (chol(Mj, LM)) break;
                jitter = (jitter == 0.0) ? 1e-14 * (1.0 + trM / std::max(1, m)) : jitter * 100.0;
                if (tries == 7) {
                    res.status = Status::MaxIter;
                    return best_score < 1e299 ? best : res;
                }
            }
        }
        auto msolve = [&](Vec rhs) {
            trisolve_lower(LM, rhs);
            trisolve_upperT(LM, rhs);
            return rhs;
        };

        auto assemble_dZ = [&](const Vec& dy) {
            std::vector<Dense> dZ = Rd;
            for (int p = 0; p < m; ++p) {
                double v = dy[static_cast<size_t>(p)];
                if (v == 0.0) continue;
                for (const auto& e : Ahat[static_cast<size_t>(p)]) {
                    dZ[static_cast<size_t>(e.blk)].at(e.r, e.c) -= v * e.v;
                    if (e.r != e.c) dZ[static_cast<size_t>(e.blk)].at(e.c, e.r) -= v * e.v;
                }
            }
            return dZ;
        };
        auto assemble_dX = [&](const std::vector<Dense>& dZ, double sigmamu) {
            std::vector<Dense> dX(static_cast<size_t>(nb));
            for (int bk = 0; bk < nb; ++bk) {
                const Dense& Wb = W[static_cast<size_t>(bk)];
                Dense t = matmul(matmul(Wb, dZ[static_cast<size_t>(bk)]), Wb);
                Dense r = Zinv[static_cast<size_t>(bk)];
                Dense out(Wb.d);
                for (size_t k = 0; k < out.a.size(); ++k)
                    out.a[k] = sigmamu * r.a[k] - X[static_cast<size_t>(bk)].a[k] - t.a[k];
                // symmetrize
                for (int i = 0; i < out.d; ++i)
                    for (int j = i + 1; j < out.d; ++j) {
                        double s = 0.5 * (out.at(i, j) + out.at(j, i));
                        out.at(i, j) = s;
                        out.at(j, i) = s;
                    }
                dX[static_cast<size_t>(bk)] = out;
            }
            return dX;
        };
        auto maxstep = [&](const std::vector<Dense>& S, const std::vector<Dense>& dS) {
            double alpha = 1e30;
            for (int bk = 0; bk < nb; ++bk) {
                Dense L;
                Dense Sb = S[static_cast<size_t>(bk)];
                if (!chol(Sb, L)) {
                    for (int i = 0; i < Sb.d; ++i) Sb.at(i, i) += 1e-13;
                    if (!chol(Sb, L)) return 0.0;
                }
                Dense B = congruence_inv(L, dS[static_cast<size_t>(bk)]);
                double lmin = min_eig(B);
                if (lmin < -1e-13) alpha = std::min(alpha, -1.0 / lmin);
            }
            return alpha;
        };

        auto rhs_for = [&](double sigmamu) {
            // M dy = rp - <Ahat_p, T - W Rd W>, T = sigmamu Zinv - X
            Vec rhs(static_cast<size_t>(m));
            std::vector<Dense> K(static_cast<size_t>(nb));
            for (int bk = 0; bk < nb; ++bk) {
                const Dense& Wb = W[static_cast<size_t>(bk)];
                Dense t = matmul(matmul(Wb, Rd[static_cast<size_t>(bk)]), Wb);
                Dense out(Wb.d);
                for (size_t k = 0; k < out.a.size(); ++k)
                    out.a[k] = sigmamu * Zinv[static_cast<size_t>(bk)].a[k] -
                               X[static_cast<size_t>(bk)].a[k] - t.a[k];
                K[static_cast<size_t>(bk)] = out;
            }
            for (int p = 0; p < m; ++p)
                rhs[static_cast<size_t>(p)] =
                    rpv[static_cast<size_t>(p)] - sparse_inner(Ahat[static_cast<size_t>(p)], K);
            return rhs;
        };

        // predictor
        Vec dy_aff = msolve(rhs_for(0.0));
        auto dZ_aff = assemble_dZ(dy_aff);
        auto dX_aff = assemble_dX(dZ_aff, 0.0);
        double ap_aff = std::min(1.0, 0.98 * maxstep(X, dX_aff));
        double ad_aff = std::min(1.0, 0.98 * maxstep(Z, dZ_aff));
        double mu_aff = 0;
        for (int bk = 0; bk < nb; ++bk) {
            Dense xd = X[static_cast<size_t>(bk)];
            xd.axpy(ap_aff, dX_aff[static_cast<size_t>(bk)]);
            Dense zd = Z[static_cast<size_t>(bk)];
            zd.axpy(ad_aff, dZ_aff[static_cast<size_t>(bk)]);
            mu_aff += dot_dense(xd, zd);
        }
        mu_aff /= std::max(1, N);
        double sig = std::pow(std::max(0.0, mu_aff / std::max(mu, 1e-300)), 3.0);
        sig = std::min(0.99, std::max(1e-6, sig));

        // corrector
        Vec dy = msolve(rhs_for(sig * mu));
        auto dZn = assemble_dZ(dy);
        auto dXn = assemble_dX(dZn, sig * mu);
        double ap = std::min(1.0, 0.98 * maxstep(X, dXn));
        double ad = std::min(1.0, 0.98 * maxstep(Z, dZn));

        for (int bk = 0; bk < nb; ++bk) {
            X[static_cast<size_t>(bk)].axpy(ap, dXn[static_cast<size_t>(bk)]);
            Z[static_cast<size_t>(bk)].axpy(ad, dZn[static_cast<size_t>(bk)]);
        }
        for (int p = 0; p < m; ++p) res.y[static_cast<size_t>(p)] += ad * dy[static_cast<size_t>(p)];
    }

    if (res.status == Status::MaxIter && best_score < 1e299) {
        best.status = Status::MaxIter;
        return best;
    }
    return res;
}

}  // namespace

std::vector<CMatrix> Problem::reconstruct_vars(const std::vector<double>& y) const {
    std::vector<CMatrix> out;
    for (const auto& v : vars_) {
        CMatrix mat(v.rows, v.cols);
        if (v.kind == VarKind::Hermitian) {
            const int n = v.cols;
            for (int i = 0; i < n; ++i) {
                mat(i, i) = y[static_cast<size_t>(v.param_offset + i * n + i)];
                for (int j = i + 1; j < n; ++j) {
                    double re = y[static_cast<size_t>(v.param_offset + i * n + j)];
                    double im = y[static_cast<size_t>(v.param_offset + j * n + i)];
                    mat(i, j) = cplx(re, im);
                    mat(j, i) = cplx(re, -im);
                }
            }
        } else {
            for (int i = 0; i < v.rows; ++i)
                for (int j = 0; j < v.cols; ++j)
                    mat(i, j) =
                        cplx(y[static_cast<size_t>(v.param_offset + 2 * (i * v.cols + j))],
                             y[static_cast<size_t>(v.param_offset + 2 * (i * v.cols + j) + 1)]);
        }
        out.push_back(mat);
    }
    return out;
}

// ---------------------------------------------------------------------------
// compile + solve

struct Compiler {
    const Problem& prob;

    // equality elimination: params y = y0 + sum_q N[:,q] z_q
    Vec y0;
    std::vector<std::vector<std::pair<int, double>>> Ncols;  // sparse columns
    bool eq_infeasible = false;

    explicit Compiler(const Problem& p) : prob(p) { eliminate(); }

    void eliminate() {
        const int m = prob.num_params_;
        const int k = static_cast<int>(prob.eqs_.size());
        y0.assign(static_cast<size_t>(m), 0.0);
        if (k == 0) {
            Ncols.resize(static_cast<size_t>(m));
            for (int p = 0; p < m; ++p) Ncols[static_cast<size_t>(p)] = {{p, 1.0}};
            return;
        }
        // dense RREF of [H | g]
        std::vector<Vec> H(static_cast<size_t>(k), Vec(static_cast<size_t>(m) + 1, 0.0));
        for (int e = 0; e < k; ++e) {
            for (const auto& t : prob.eqs_[static_cast<size_t>(e)].terms)
                H[static_cast<size_t>(e)][static_cast<size_t>(t.param)] += t.coeff;
            H[static_cast<size_t>(e)][static_cast<size_t>(m)] = prob.eqs_[static_cast<size_t>(e)].rhs;
        }
        std::vector<int> pivot_col;
        int row = 0;
        for (int col = 0; col < m && row < k; ++col) {
            int best = -1;
            double bv = 1e-11;
            for (int r = row; r < k; ++r)
                if (std::abs(H[static_cast<size_t>(r)][static_cast<size_t>(col)]) > bv) {
                    bv = std::abs(H[static_cast<size_t>(r)][static_cast<size_t>(col)]);
                    best = r;
                }
            if (best < 0) continue;
            std::swap(H[static_cast<size_t>(row)], H[static_cast<size_t>(best)]);
            double piv = H[static_cast<size_t>(row)][static_cast<size_t>(col)];
            for (int c = 0; c <= m; ++c) H[static_cast<size_t>(row)][static_cast<size_t>(c)] /= piv;
            for (int r = 0; r < k; ++r) {
                if (r == row) continue;
                double f = H[static_cast<size_t>(r)][static_cast<size_t>(col)];
                if (f == 0.0) continue;
                for (int c = 0; c <= m; ++c)
                    H[static_cast<size_t>(r)][static_cast<size_t>(c)] -=
                        f * H[static_cast<size_t>(row)][static_cast<size_t>(c)];
            }
            pivot_col.push_back(col);
            ++row;
        }
        for (int r = row; r < k; ++r)
            if (std::abs(H[static_cast<size_t>(r)][static_cast<size_t>(m)]) > 1e-9) {
                eq_infeasible = true;
                return;
            }
        std::vector<char> is_pivot(static_cast<size_t>(m), 0);
        for (size_t i = 0; i < pivot_col.size(); ++i) {
            is_pivot[static_cast<size_t>(pivot_col[i])] = 1;
            y0[static_cast<size_t>(pivot_col[i])] = H[i][static_cast<size_t>(m)];
        }
        for (int col = 0; col < m; ++col) {
            if (is_pivot[static_cast<size_t>(col)]) continue;
            std::vector<std::pair<int, double>> ncol;
            ncol.emplace_back(col, 1.0);
            for (size_t i = 0; i < pivot_col.size(); ++i) {
                double v = H[i][static_cast<size_t>(col)];
                if (std::abs(v) > 1e-13) ncol.emplace_back(pivot_col[i], -v);
            }
            Ncols.push_back(std::move(ncol));
        }
    }
};

Solution Problem::solve(const SolveOptions& opts) const {
    Solution sol;
    sol.sense = sense_;

    Compiler comp(*this);
    if (comp.eq_infeasible) {
        sol.status = Status::Infeasible;
        return sol;
    }

    // realified constant part per LMI: F0(y0) and per-original-param sparse.
    const int nlmi = static_cast<int>(lmis_.size());
    RealProblem rp;
    for (const auto& l : lmis_) rp.bdims.push_back(2 * l.dim);
    rp.C.reserve(static_cast<size_t>(nlmi));

    // per original param: realified sparse entries across LMIs
    std::vector<std::vector<SparseEnt>> Aorig(static_cast<size_t>(num_params_));
    auto push_realified = [](std::vector<SparseEnt>& out, int blk, int D, int r, int c, cplx z) {
        const double re = z.real(), im = z.imag();
        if (r == c) {
            if (re != 0.0) {
                out.push_back({blk, r, c, re});
                out.push_back({blk, r + D, c + D, re});
            }
            // imaginary part on the diagonal must vanish for Hermitian data
        } else {
            if (re != 0.0) {
                out.push_back({blk, r, c, re});
                out.push_back({blk, r + D, c + D, re});
            }
            if (im != 0.0) {
                out.push_back({blk, r, c + D, -im});
                out.push_back({blk, c, r + D, im});
            }
        }
    };

    for (int li = 0; li < nlmi; ++li) {
        const auto& l = lmis_[static_cast<size_t>(li)];
        const int D = l.dim;
        Dense c0(2 * D);
        std::vector<SparseEnt> tmp;
        for (const auto& t : l.const_terms) push_realified(tmp, li, D, t.r, t.c, t.coeff);
        for (const auto& e : tmp) {
            c0.at(e.r, e.c) += e.v;
            if (e.r != e.c) c0.at(e.c, e.r) += e.v;
        }
        // add the y0 contribution of eliminated params
        rp.C.push_back(c0);
        for (const auto& t : l.terms)
            push_realified(Aorig[static_cast<size_t>(t.param)], li, D, t.r, t.c, t.coeff);
    }
    // fold y0 into C
    for (int p = 0; p < num_params_; ++p) {
        double v = comp.y0[static_cast<size_t>(p)];
        if (v == 0.0) continue;
        for (const auto& e : Aorig[static_cast<size_t>(p)]) {
            rp.C[static_cast<size_t>(e.blk)].at(e.r, e.c) += v * e.v;
            if (e.r != e.c) rp.C[static_cast<size_t>(e.blk)].at(e.c, e.r) += v * e.v;
        }
    }

    // objective vector over original params
    Vec cvec(static_cast<size_t>(num_params_), 0.0);
    for (const auto& t : obj_) cvec[static_cast<size_t>(t.param)] += t.coeff;
    double shift = obj_const_;
    for (int p = 0; p < num_params_; ++p) shift += cvec[static_cast<size_t>(p)] * comp.y0[static_cast<size_t>(p)];

    // z-space params: combine sparse A with N columns; drop unconstrained ones.
    std::vector<int> zmap;  // z index -> Ncols index
    for (size_t q = 0; q < comp.Ncols.size(); ++q) {
        std::vector<SparseEnt> az;
        double bz = 0;
        for (const auto& [p, w] : comp.Ncols[q]) {
            bz += w * cvec[static_cast<size_t>(p)];
            for (const auto& e : Aorig[static_cast<size_t>(p)]) {
                SparseEnt se = e;
                se.v *= w;
                az.push_back(se);
            }
        }
        // merge duplicates
        std::sort(az.begin(), az.end(), [](const SparseEnt& a, const SparseEnt& b) {
            return std::tie(a.blk, a.r, a.c) < std::tie(b.blk, b.r, b.c);
        });
        std::vector<SparseEnt> merged;
        for (const auto& e : az) {
            if (!merged.empty() && merged.back().blk == e.blk && merged.back().r == e.r &&
                merged.back().c == e.c)
                merged.back().v += e.v;
            else
                merged.push_back(e);
        }
        merged.erase(std::remove_if(merged.begin(), merged.end(),
                                    [](const SparseEnt& e) { return std::abs(e.v) < 1e-15; }),
                     merged.end());
        if (merged.empty()) {
            if (std::abs(bz) > 1e-12) {
                // objective direction with no constraint: unbounded
                sol.status = Status::Unbounded;
                return sol;
            }
            continue;
        }
        // internal solver maximizes; flip for min sense
        rp.A.push_back(std::move(merged));
        rp.b.push_back(sense_ == Sense::Max ? bz : -bz);
        zmap.push_back(static_cast<int>(q));
    }

    if (rp.A.empty()) {
        // No free parameters: check constant feasibility.
        bool feas = true;
        for (const auto& c : rp.C)
            if (min_eig(c) < -opts.feas_tol) feas = false;
        sol.status = feas ? Status::Optimal : Status::Infeasible;
        sol.primal_value = shift;
        sol.dual_value = shift;
        sol.gap = 0;
        // reconstruct variables from y0
        Vec y = comp.y0;
        sol.variables = reconstruct_vars(y);
        return sol;
    }

    RealResult rr = solve_real(rp, opts);

    sol.status = rr.status;
    sol.iterations = rr.iterations;
    sol.primal_residual = rr.pres;
    sol.dual_residual = rr.dres;

    // reconstruct y = y0 + N z
    Vec y = comp.y0;
    for (size_t zi = 0; zi < rr.y.size(); ++zi) {
        double zv = rr.y[zi];
        for (const auto& [p, w] : comp.Ncols[static_cast<size_t>(zmap[zi])])
            y[static_cast<size_t>(p)] += w * zv;
    }

    // achieved objective from variables; certified bound from internal primal
    double achieved = obj_const_;
    for (const auto& t : obj_) achieved += t.coeff * y[static_cast<size_t>(t.param)];
    double internal_primal = rr.pobj;  // >= internal optimum (max sense dual pair)
    double bound = (sense_ == Sense::Max) ? internal_primal + shift - 0.0
                                          : -internal_primal + shift - 0.0;
    // note: shift already contains obj at y0; internal dual value = rr.dobj
    // satisfies achieved = sense * rr.dobj + shift.
    sol.primal_value = achieved;
    sol.dual_value = bound;
    sol.gap = std::abs(sol.primal_value - sol.dual_value);

    sol.variables = reconstruct_vars(y);

    // complex PSD certificates per LMI: Y = 2 (P + i Q) from the realified primal.
    for (int li = 0; li < nlmi; ++li) {
        const int D = lmis_[static_cast<size_t>(li)].dim;
        const Dense& Xb = rr.X[static_cast<size_t>(li)];
        CMatrix Y(D, D);
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) {
                double pre = 0.5 * (Xb.at(i, j) + Xb.at(i + D, j + D));
                double qim = 0.5 * (Xb.at(i + D, j) - Xb.at(i, j + D));
                Y(i, j) = cplx(pre, qim);
            }
        // Yh = Y + Y^dagger carries the factor 2 from <realify(A), X> = 2 Re <A, Y>
        // and averages away the J-symmetrization residue.
        CMatrix Yh(D, D);
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) Yh(i, j) = Y(i, j) + std::conj(Y(j, i));
        sol.lmi_duals.push_back(Yh);
    }
    return sol;
}

// ---------------------------------------------------------------------------
// JSON round-trip

std::string Problem::to_json() const {
    nlohmann::json j;
    j["sense"] = sense_ == Sense::Min ? "min" : "max";
    j["obj_const"] = obj_const_;
    j["vars"] = nlohmann::json::array();
    for (const auto& v : vars_)
        j["vars"].push_back({{"name", v.name},
                             {"rows", v.rows},
                             {"cols", v.cols},
                             {"kind", v.kind == VarKind::Hermitian ? "hermitian" : "complex"}});
    auto term_to_json = [](const LmiTerm& t) {
        return nlohmann::json{{"r", t.r}, {"c", t.c}, {"param", t.param},
                              {"re", t.coeff.real()}, {"im", t.coeff.imag()}};
    };
    j["lmis"] = nlohmann::json::array();
    for (const auto& l : lmis_) {
        nlohmann::json jl;
        jl["dim"] = l.dim;
        jl["terms"] = nlohmann::json::array();
        for (const auto& t : l.terms) jl["terms"].push_back(term_to_json(t));
        jl["const_terms"] = nlohmann::json::array();
        for (const auto& t : l.const_terms) jl["const_terms"].push_back(term_to_json(t));
        j["lmis"].push_back(jl);
    }
    j["eqs"] = nlohmann::json::array();
    for (const auto& e : eqs_) {
        nlohmann::json je;
        je["rhs"] = e.rhs;
        je["terms"] = nlohmann::json::array();
        for (const auto& t : e.terms) je["terms"].push_back({{"param", t.param}, {"coeff", t.coeff}});
        j["eqs"].push_back(je);
    }
    j["obj"] = nlohmann::json::array();
    for (const auto& t : obj_) j["obj"].push_back({{"param", t.param}, {"coeff", t.coeff}});
    return j.dump();
}

Problem Problem::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Problem p;
    p.sense_ = (j.at("sense").get<std::string>() == "min") ? Sense::Min : Sense::Max;
    p.obj_const_ = j.at("obj_const").get<double>();
    for (const auto& jv : j.at("vars")) {
        if (jv.at("kind").get<std::string>() == "hermitian")
            p.add_hermitian_var(jv.at("name").get<std::string>(), jv.at("rows").get<int>());
        else
            p.add_complex_var(jv.at("name").get<std::string>(), jv.at("rows").get<int>(),
                              jv.at("cols").get<int>());
    }
    for (const auto& jl : j.at("lmis")) {
        int id = p.add_lmi(jl.at("dim").get<int>());
        auto& l = p.lmis_[static_cast<size_t>(id)];
        for (const auto& jt : jl.at("terms"))
            l.terms.push_back({jt.at("r").get<int>(), jt.at("c").get<int>(), jt.at("param").get<int>(),
                               cplx(jt.at("re").get<double>(), jt.at("im").get<double>())});
        for (const auto& jt : jl.at("const_terms"))
            l.const_terms.push_back({jt.at("r").get<int>(), jt.at("c").get<int>(), -1,
                                     cplx(jt.at("re").get<double>(), jt.at("im").get<double>())});
    }
    for (const auto& je : j.at("eqs")) {
        int id = p.add_eq(je.at("rhs").get<double>());
        for (const auto& jt : je.at("terms"))
            p.eqs_[static_cast<size_t>(id)].terms.push_back(
                {jt.at("param").get<int>(), jt.at("coeff").get<double>()});
    }
    for (const auto& jt : j.at("obj"))
        p.obj_.push_back({jt.at("param").get<int>(), jt.at("coeff").get<double>()});
    return p;
}

}  // namespace vna::sdp

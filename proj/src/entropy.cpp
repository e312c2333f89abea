#include "vna/entropy.hpp"

#include <cmath>

namespace vna::entropy {

namespace {

constexpr double kLog2e = 1.4426950408889634074;  // 1/ln 2

double log2_safe(double x) { return std::log(std::max(x, 1e-300)) * kLog2e; }

sdp::Solution solve_ok(const sdp::Problem& p, const sdp::SolveOptions& opts, const char* what) {
    sdp::Solution sol = p.solve(opts);
    if (sol.status == sdp::Status::Optimal) return sol;
    if (sol.status == sdp::Status::MaxIter) {
        double scale = 1.0 + std::abs(sol.primal_value) + std::abs(sol.dual_value);
        if (sol.gap / scale <= 50 * opts.gap_tol && sol.primal_residual <= 100 * opts.feas_tol &&
            sol.dual_residual <= 100 * opts.feas_tol)
            return sol;
    }
    throw linalg::Error(std::string(what) + ": solver returned " + sdp::to_string(sol.status) +
                        " (gap " + std::to_string(sol.gap) + ")");
}

sdp::SolveOptions tighten(const sdp::SolveOptions& opts) {
    sdp::SolveOptions o = opts;
    o.gap_tol = std::min(o.gap_tol, 1e-10);
    o.feas_tol = std::min(o.feas_tol, 1e-9);
    return o;
}

// Eigenbasis support reduction of a PSD matrix: R = V diag(lams) V^dagger with
// V of shape D x r. Cutoff is relative to the top eigenvalue and deliberately
// near machine precision: discarded weight w perturbs root fidelities by at
// most sqrt(w).
struct SupportBasis {
    CMatrix v;                  // D x r isometry
    std::vector<double> lams;   // kept eigenvalues, descending
};

SupportBasis reduce_support(const CMatrix& r, double rel_cutoff = 1e-13) {
    auto e = linalg::herm_eig(r, 1e-8);
    double lmax = e.values.empty() ? 0.0 : std::max(0.0, e.values.front());
    SupportBasis sb;
    int rank = 0;
    for (double lam : e.values)
        if (lam > rel_cutoff * lmax && lam > 0) ++rank;
    sb.v = CMatrix(r.rows(), rank);
    for (int k = 0; k < rank; ++k) {
        sb.lams.push_back(e.values[static_cast<size_t>(k)]);
        for (int i = 0; i < r.rows(); ++i) sb.v(i, k) = e.vectors(i, k);
    }
    return sb;
}

// entry helpers: add tau_A (x) sigma terms of an LMI block
void add_kron_sigma_terms(sdp::Problem& p, int lmi, int row_off, int a_dim, int nb, int sigma_var,
                          double mult) {
    for (int al = 0; al < a_dim; ++al)
        for (int q = 0; q < nb; ++q)
            for (int s = q; s < nb; ++s)
                p.lmi_term(lmi, row_off + al * nb + q, row_off + al * nb + s, sigma_var, q, s,
                           mult);
}

void add_const_matrix(sdp::Problem& p, int lmi, int row_off, int col_off, const CMatrix& m,
                      double mult) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if (row_off + i > col_off + j) continue;
            linalg::cplx v = mult * m(i, j);
            if (std::abs(v) > 0) p.lmi_const(lmi, row_off + i, col_off + j, v);
        }
}

void add_var_matrix_terms(sdp::Problem& p, int lmi, int row_off, int var, int dim, double mult) {
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j)
            p.lmi_term(lmi, row_off + i, row_off + j, var, i, j, mult);
}

}  // namespace

double Conditional::weight() const {
    double w = 0;
    for (const auto& cell : cells) w += cell.density.trace().real();
    return w;
}

Conditional Conditional::from_state(const State& s, const Algebra& a, const Algebra& b) {
    for (const auto& blk : a.blocks())
        if (blk.multiplicity != 1)
            throw states::NotTensor("conditional: A-side blocks must have multiplicity 1");
    Algebra ab = algebra::tensor(a, b);
    if (s.algebra().num_blocks() != ab.num_blocks())
        throw states::NotTensor("conditional: state does not live on tensor(a, b)");
    Conditional c;
    for (int j = 0; j < b.num_blocks(); ++j) c.b_dims.push_back(b.block(j).dim);
    for (int i = 0; i < a.num_blocks(); ++i)
        for (int j = 0; j < b.num_blocks(); ++j) {
            int k = algebra::tensor_block_index(a, b, i, j);
            if (s.density(k).rows() != a.block(i).dim * b.block(j).dim)
                throw states::NotTensor("conditional: block dim mismatch");
            c.cells.push_back({a.block(i).dim, j, s.density(k)});
        }
    return c;
}

Conditional Conditional::from_cq(const CqState& cq) {
    Conditional c;
    for (int j = 0; j < cq.b.num_blocks(); ++j) c.b_dims.push_back(cq.b.block(j).dim);
    for (size_t x = 0; x < cq.parts.size(); ++x)
        for (int j = 0; j < cq.b.num_blocks(); ++j)
            c.cells.push_back({1, j, cq.parts[x][static_cast<size_t>(j)]});
    return c;
}

Conditional purified_complement(const Conditional& c, int pad_dim) {
    Conditional out;
    for (size_t ci = 0; ci < c.cells.size(); ++ci) {
        const auto& cell = c.cells[ci];
        const int a = cell.a_dim;
        const int nb = c.b_dims[static_cast<size_t>(cell.b_idx)];
        const int d = a * nb;
        CMatrix t = linalg::psd_sqrt(cell.density, 1e-8);
        const int m = d * pad_dim;
        // leg matrix with the optional pure pad on the right leg
        CMatrix tp(d, m);
        for (int r = 0; r < d; ++r)
            for (int u = 0; u < d; ++u) tp(r, u * pad_dim) = t(r, u);
        // D_AC[(i,u),(i',u')] = sum_alpha T[(i,alpha),u] conj(T[(i',alpha),u'])
        CMatrix dens(a * m, a * m);
        for (int al = 0; al < nb; ++al) {
            std::vector<linalg::cplx> v(static_cast<size_t>(a) * m);
            for (int i = 0; i < a; ++i)
                for (int u = 0; u < m; ++u)
                    v[static_cast<size_t>(i) * m + u] = tp(i * nb + al, u);
            for (int r = 0; r < a * m; ++r)
                for (int s2 = 0; s2 < a * m; ++s2)
                    dens(r, s2) += v[static_cast<size_t>(r)] * std::conj(v[static_cast<size_t>(s2)]);
        }
        out.b_dims.push_back(m);
        out.cells.push_back({a, static_cast<int>(ci), dens});
    }
    return out;
}

double dmax(const State& omega, const State& sigma, double tol) {
    if (omega.algebra().num_blocks() != sigma.algebra().num_blocks())
        throw states::AlgebraMismatch("dmax: block count mismatch");
    double lam = 0.0;
    for (int k = 0; k < omega.algebra().num_blocks(); ++k) {
        const CMatrix& w = omega.density(k);
        const CMatrix& sg = sigma.density(k);
        double wtr = w.trace().real();
        if (wtr <= 1e-15 && w.frobenius_norm() <= 1e-12) continue;
        CMatrix p = linalg::support_projector(sg, tol);
        CMatrix ker = CMatrix::identity(w.rows()) - p;
        double leak = (ker * w * ker).trace().real();
        if (leak > 1e-9 * std::max(1.0, wtr) + 1e-12)
            return std::numeric_limits<double>::infinity();
        CMatrix si = linalg::psd_pow(sg, -0.5, tol);
        CMatrix ratio = si * w * si;
        auto e = linalg::herm_eig(ratio, 1e-7);
        if (!e.values.empty()) lam = std::max(lam, e.values.front());
    }
    if (lam <= 0) return -std::numeric_limits<double>::infinity();
    return log2_safe(lam);
}

EntropyResult hmin(const Conditional& c, const sdp::SolveOptions& opts_in) {
    sdp::SolveOptions opts = tighten(opts_in);
    sdp::Problem p;
    p.set_sense(sdp::Sense::Min);
    std::vector<int> sigma_vars;
    for (size_t j = 0; j < c.b_dims.size(); ++j) {
        int v = p.add_hermitian_var("sigma" + std::to_string(j), c.b_dims[j]);
        sigma_vars.push_back(v);
        p.obj_trace(v, 1.0);
        int pos = p.add_lmi(c.b_dims[j]);
        add_var_matrix_terms(p, pos, 0, v, c.b_dims[j], 1.0);
    }
    std::vector<int> cell_lmis;
    for (const auto& cell : c.cells) {
        const int nb = c.b_dims[static_cast<size_t>(cell.b_idx)];
        const int d = cell.a_dim * nb;
        int lmi = p.add_lmi(d);
        add_const_matrix(p, lmi, 0, 0, cell.density, -1.0);
        add_kron_sigma_terms(p, lmi, 0, cell.a_dim, nb, sigma_vars[static_cast<size_t>(cell.b_idx)],
                             1.0);
        cell_lmis.push_back(lmi);
    }
    auto sol = solve_ok(p, opts, "hmin");

    EntropyResult r;
    double lam = sol.primal_value;
    r.value = -log2_safe(lam);
    r.lo = -log2_safe(sol.value_hi());
    r.hi = -log2_safe(std::max(sol.value_lo(), 1e-300));
    r.gap = r.hi - r.lo;
    r.iterations = sol.iterations;
    r.sigma = std::vector<CMatrix>();
    for (size_t j = 0; j < c.b_dims.size(); ++j)
        r.sigma->push_back(sol.variables[static_cast<size_t>(sigma_vars[j])]);

    // dual (M_ij) per cell, completed with the sigma-cone multiplier so that
    // sum over cells of Tr_A M equals the identity on each b block.
    std::vector<int> cells_per_block(c.b_dims.size(), 0);
    for (const auto& cell : c.cells) cells_per_block[static_cast<size_t>(cell.b_idx)]++;
    r.dual_povm = std::vector<CMatrix>();
    for (size_t ci = 0; ci < c.cells.size(); ++ci) {
        const auto& cell = c.cells[ci];
        const int nb = c.b_dims[static_cast<size_t>(cell.b_idx)];
        CMatrix m = sol.lmi_duals[static_cast<size_t>(cell_lmis[ci])];
        const CMatrix& n = sol.lmi_duals[static_cast<size_t>(cell.b_idx)];  // sigma >= 0 block
        double share = 1.0 / (cell.a_dim * cells_per_block[static_cast<size_t>(cell.b_idx)]);
        CMatrix pad = linalg::kron(CMatrix::identity(cell.a_dim), n);
        pad *= linalg::cplx(share, 0);
        m += pad;
        r.dual_povm->push_back(m);
    }
    return r;
}

EntropyResult pguess(const CqState& cq, const sdp::SolveOptions& opts_in) {
    sdp::SolveOptions opts = tighten(opts_in);
    const int nx = static_cast<int>(cq.alphabet.size());
    const int nbk = cq.b.num_blocks();
    sdp::Problem p;
    p.set_sense(sdp::Sense::Max);
    std::vector<std::vector<int>> evars(static_cast<size_t>(nx));
    for (int x = 0; x < nx; ++x)
        for (int j = 0; j < nbk; ++j) {
            int dim = cq.b.block(j).dim;
            int v = p.add_hermitian_var("E" + std::to_string(x) + "_" + std::to_string(j), dim);
            evars[static_cast<size_t>(x)].push_back(v);
            int pos = p.add_lmi(dim);
            add_var_matrix_terms(p, pos, 0, v, dim, 1.0);
            // objective sum_x Tr(rho^x E_x)
            const CMatrix& rho = cq.parts[static_cast<size_t>(x)][static_cast<size_t>(j)];
            for (int q = 0; q < dim; ++q)
                for (int s = 0; s < dim; ++s)
                    if (std::abs(rho(q, s)) > 0) p.obj_term(v, s, q, rho(q, s));
        }
    // completeness per block entry
    for (int j = 0; j < nbk; ++j) {
        int dim = cq.b.block(j).dim;
        for (int q = 0; q < dim; ++q)
            for (int s = q; s < dim; ++s) {
                int eqr = p.add_eq(q == s ? 1.0 : 0.0);
                for (int x = 0; x < nx; ++x)
                    p.eq_re(eqr, evars[static_cast<size_t>(x)][static_cast<size_t>(j)], q, s, 1.0);
                if (q != s) {
                    int eqi = p.add_eq(0.0);
                    for (int x = 0; x < nx; ++x)
                        p.eq_im(eqi, evars[static_cast<size_t>(x)][static_cast<size_t>(j)], q, s,
                                1.0);
                }
            }
    }
    auto sol = solve_ok(p, opts, "pguess");

    EntropyResult r;
    r.value = sol.primal_value;
    r.lo = sol.value_lo();
    r.hi = sol.value_hi();
    r.gap = sol.gap;
    r.iterations = sol.iterations;
    r.povm = std::vector<std::vector<CMatrix>>();
    for (int x = 0; x < nx; ++x) {
        std::vector<CMatrix> blocks;
        for (int j = 0; j < nbk; ++j)
            blocks.push_back(sol.variables[static_cast<size_t>(
                evars[static_cast<size_t>(x)][static_cast<size_t>(j)])]);
        r.povm->push_back(std::move(blocks));
    }

    // mandatory cross-check against hmin of the assembled cq state
    EntropyResult h = hmin(Conditional::from_cq(cq), opts_in);
    if (std::abs(-log2_safe(r.value) - h.value) > 1e-7)
        throw CrossCheckFailure("pguess: -log p_guess deviates from Hmin by " +
                                std::to_string(std::abs(-log2_safe(r.value) - h.value)));
    return r;
}

EntropyResult hmax_fidelity_route(const Conditional& c, const sdp::SolveOptions& opts_in) {
    sdp::SolveOptions opts = tighten(opts_in);
    sdp::Problem p;
    p.set_sense(sdp::Sense::Max);
    std::vector<int> sigma_vars;
    for (size_t j = 0; j < c.b_dims.size(); ++j) {
        int v = p.add_hermitian_var("sigma" + std::to_string(j), c.b_dims[j]);
        sigma_vars.push_back(v);
        int pos = p.add_lmi(c.b_dims[j]);
        add_var_matrix_terms(p, pos, 0, v, c.b_dims[j], 1.0);
    }
    {
        int eq = p.add_eq(1.0);
        for (size_t j = 0; j < c.b_dims.size(); ++j)
            for (int i = 0; i < c.b_dims[j]; ++i) p.eq_re(eq, sigma_vars[j], i, i, 1.0);
    }
    for (const auto& cell : c.cells) {
        const int nb = c.b_dims[static_cast<size_t>(cell.b_idx)];
        const int d = cell.a_dim * nb;
        SupportBasis sb = reduce_support(cell.density);
        const int rank = static_cast<int>(sb.lams.size());
        if (rank == 0) continue;  // zero-weight cell contributes no fidelity
        int z = p.add_complex_var("Z", rank, d);
        // objective Re Tr(Z V): V = sb.v (d x rank)
        for (int u = 0; u < rank; ++u)
            for (int i = 0; i < d; ++i)
                if (std::abs(sb.v(i, u)) > 0) p.obj_term(z, u, i, sb.v(i, u));
        int lmi = p.add_lmi(rank + d);
        for (int u = 0; u < rank; ++u) p.lmi_const(lmi, u, u, sb.lams[static_cast<size_t>(u)]);
        for (int u = 0; u < rank; ++u)
            for (int i = 0; i < d; ++i) p.lmi_term(lmi, u, rank + i, z, u, i, 1.0);
        add_kron_sigma_terms(p, lmi, rank, cell.a_dim, nb,
                             sigma_vars[static_cast<size_t>(cell.b_idx)], 1.0);
    }
    auto sol = solve_ok(p, opts, "hmax_fidelity_route");

    EntropyResult r;
    r.value = 2.0 * log2_safe(sol.primal_value);
    r.lo = 2.0 * log2_safe(std::max(sol.value_lo(), 1e-300));
    r.hi = 2.0 * log2_safe(sol.value_hi());
    r.gap = r.hi - r.lo;
    r.iterations = sol.iterations;
    r.sigma = std::vector<CMatrix>();
    for (size_t j = 0; j < c.b_dims.size(); ++j)
        r.sigma->push_back(sol.variables[static_cast<size_t>(sigma_vars[j])]);
    return r;
}

EntropyResult hmax_duality_route(const Conditional& c, int pad_dim,
                                 const sdp::SolveOptions& opts) {
    EntropyResult h = hmin(purified_complement(c, pad_dim), opts);
    EntropyResult r;
    r.value = -h.value;
    r.lo = -h.hi;
    r.hi = -h.lo;
    r.gap = h.gap;
    r.iterations = h.iterations;
    return r;
}

EntropyResult hmax(const Conditional& c, const sdp::SolveOptions& opts) {
    EntropyResult dual = hmax_duality_route(c, 1, opts);
    EntropyResult fid = hmax_fidelity_route(c, opts);
    if (std::abs(dual.value - fid.value) > 1e-6)
        throw CrossCheckFailure("hmax: duality and fidelity routes disagree by " +
                                std::to_string(std::abs(dual.value - fid.value)));
    dual.sigma = fid.sigma;
    return dual;
}

EntropyResult hmin_smooth(const Conditional& c, double eps, const sdp::SolveOptions& opts_in,
                          bool normalized_ball) {
    if (eps < 0 || eps >= 1) throw sdp::IllFormed("hmin_smooth: eps must be in [0, 1)");
    if (eps < 1e-9) {
        EntropyResult r = hmin(c, opts_in);
        r.eps = eps;
        return r;
    }
    sdp::SolveOptions opts = tighten(opts_in);
    const double w = c.weight();
    const bool subnorm = !normalized_ball && (w < 1.0 - 1e-12);

    sdp::Problem p;
    p.set_sense(sdp::Sense::Min);
    std::vector<int> sigma_vars;
    for (size_t j = 0; j < c.b_dims.size(); ++j) {
        int v = p.add_hermitian_var("sigma" + std::to_string(j), c.b_dims[j]);
        sigma_vars.push_back(v);
        p.obj_trace(v, 1.0);
        int pos = p.add_lmi(c.b_dims[j]);
        add_var_matrix_terms(p, pos, 0, v, c.b_dims[j], 1.0);
    }
    std::vector<int> wvars;
    for (const auto& cell : c.cells) {
        const int nb = c.b_dims[static_cast<size_t>(cell.b_idx)];
        const int d = cell.a_dim * nb;
        int wv = p.add_hermitian_var("w", d);
        wvars.push_back(wv);
        int pos = p.add_lmi(d);
        add_var_matrix_terms(p, pos, 0, wv, d, 1.0);
        int dom = p.add_lmi(d);
        add_var_matrix_terms(p, dom, 0, wv, d, -1.0);
        add_kron_sigma_terms(p, dom, 0, cell.a_dim, nb, sigma_vars[static_cast<size_t>(cell.b_idx)],
                             1.0);
    }
    // fidelity certificates and the root-fidelity constraint
    int rootfid = p.add_lmi(1);
    p.lmi_const(rootfid, 0, 0, -std::sqrt(std::max(0.0, 1.0 - eps * eps)));
    for (size_t ci = 0; ci < c.cells.size(); ++ci) {
        const auto& cell = c.cells[ci];
        const int nb = c.b_dims[static_cast<size_t>(cell.b_idx)];
        const int d = cell.a_dim * nb;
        SupportBasis sb = reduce_support(cell.density);
        const int rank = static_cast<int>(sb.lams.size());
        if (rank == 0) continue;
        int z = p.add_complex_var("Z", rank, d);
        int lmi = p.add_lmi(rank + d);
        for (int u = 0; u < rank; ++u) p.lmi_const(lmi, u, u, sb.lams[static_cast<size_t>(u)]);
        for (int u = 0; u < rank; ++u)
            for (int i = 0; i < d; ++i) p.lmi_term(lmi, u, rank + i, z, u, i, 1.0);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j)
                p.lmi_term(lmi, rank + i, rank + j, wvars[ci], i, j, 1.0);
        // Re Tr(Z V) contribution
        for (int u = 0; u < rank; ++u)
            for (int i = 0; i < d; ++i)
                if (std::abs(sb.v(i, u)) > 0) {
                    // entry (0,0) of the 1x1 root-fidelity block
                    p.lmi_term(rootfid, 0, 0, z, u, i, sb.v(i, u) * 0.5);
                    p.lmi_term_conj(rootfid, 0, 0, z, u, i, std::conj(sb.v(i, u)) * 0.5);
                }
    }

    if (normalized_ball) {
        int eq = p.add_eq(1.0);
        for (size_t ci = 0; ci < c.cells.size(); ++ci) {
            const int d = c.cells[ci].a_dim * c.b_dims[static_cast<size_t>(c.cells[ci].b_idx)];
            for (int i = 0; i < d; ++i) p.eq_re(eq, wvars[ci], i, i, 1.0);
        }
    } else if (subnorm) {
        int z0 = p.add_complex_var("z0", 1, 1);
        int hat = p.add_lmi(2);
        p.lmi_const(hat, 0, 0, 1.0 - w);
        p.lmi_const(hat, 1, 1, 1.0);
        p.lmi_term(hat, 0, 1, z0, 0, 0, 1.0);
        for (size_t ci = 0; ci < c.cells.size(); ++ci) {
            const int d = c.cells[ci].a_dim * c.b_dims[static_cast<size_t>(c.cells[ci].b_idx)];
            for (int i = 0; i < d; ++i) p.lmi_term(hat, 1, 1, wvars[ci], i, i, -1.0);
        }
        // the hat weight term enters the root-fidelity sum
        p.lmi_term(rootfid, 0, 0, z0, 0, 0, 0.5);
        p.lmi_term_conj(rootfid, 0, 0, z0, 0, 0, 0.5);
    } else {
        int sub = p.add_lmi(1);
        p.lmi_const(sub, 0, 0, 1.0);
        for (size_t ci = 0; ci < c.cells.size(); ++ci) {
            const int d = c.cells[ci].a_dim * c.b_dims[static_cast<size_t>(c.cells[ci].b_idx)];
            for (int i = 0; i < d; ++i) p.lmi_term(sub, 0, 0, wvars[ci], i, i, -1.0);
        }
    }

    auto sol = solve_ok(p, opts, "hmin_smooth");

    EntropyResult r;
    r.eps = eps;
    r.value = -log2_safe(sol.primal_value);
    r.lo = -log2_safe(sol.value_hi());
    r.hi = -log2_safe(std::max(sol.value_lo(), 1e-300));
    r.gap = r.hi - r.lo;
    r.iterations = sol.iterations;
    r.sigma = std::vector<CMatrix>();
    for (size_t j = 0; j < c.b_dims.size(); ++j)
        r.sigma->push_back(sol.variables[static_cast<size_t>(sigma_vars[j])]);
    r.smoothed = std::vector<CMatrix>();
    for (size_t ci = 0; ci < c.cells.size(); ++ci)
        r.smoothed->push_back(sol.variables[static_cast<size_t>(wvars[ci])]);
    return r;
}

EntropyResult hmax_smooth(const Conditional& c, double eps, const sdp::SolveOptions& opts) {
    if (eps < 1e-9) {
        EntropyResult r = hmax(c, opts);
        r.eps = eps;
        return r;
    }
    EntropyResult h = hmin_smooth(purified_complement(c), eps, opts);
    EntropyResult r;
    r.eps = eps;
    r.value = -h.value;
    r.lo = -h.hi;
    r.hi = -h.lo;
    r.gap = h.gap;
    r.iterations = h.iterations;
    r.smoothed = h.smoothed;
    return r;
}

double dual_povm_value(const Conditional& c, const std::vector<CMatrix>& m) {
    double v = 0;
    for (size_t ci = 0; ci < c.cells.size(); ++ci)
        v += (c.cells[ci].density * m[ci]).trace().real();
    return v;
}

double channel_fidelity_value(const Conditional& c, const std::vector<CMatrix>& m) {
    const int n = c.cells.empty() ? 0 : c.cells.front().a_dim;
    for (const auto& cell : c.cells)
        if (cell.a_dim != n)
            throw sdp::IllFormed("channel_fidelity_value: uniform A dimension required");
    // output state of E_M on A A': D[(i,k),(j,l)] = omega^ij(M_kl)
    CMatrix d(n * n, n * n);
    for (size_t ci = 0; ci < c.cells.size(); ++ci) {
        const auto& cell = c.cells[ci];
        const int nb = c.b_dims[static_cast<size_t>(cell.b_idx)];
        const CMatrix& rr = cell.density;
        const CMatrix& mm = m[ci];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        linalg::cplx s = 0;
                        for (int q = 0; q < nb; ++q)
                            for (int t = 0; t < nb; ++t)
                                s += rr(j * nb + q, i * nb + t) * mm(k * nb + t, l * nb + q);
                        d(i * n + k, j * n + l) += s;
                    }
    }
    // overlap with the unnormalized maximally entangled vector
    linalg::cplx f = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f += d(i * n + i, j * n + j);
    return f.real();
}

}  // namespace vna::entropy

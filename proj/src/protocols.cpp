#include "vna/protocols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace vna::protocols {

namespace {

int thread_cap() {
    const char* env = std::getenv("VNA_ENTROPY_THREADS");
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (!env) return hw;
    int v = std::atoi(env);
    return v >= 1 ? std::min(v, hw) : 1;
}

// Deterministic parallel map: results land in enumeration order regardless of
// scheduling.
template <typename F>
std::vector<double> parallel_map(std::size_t n, const F& fn) {
    std::vector<double> out(n, 0.0);
    int nt = std::min<std::size_t>(thread_cap(), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::thread> threads;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < nt; ++t)
        threads.emplace_back([&]() {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                out[i] = fn(i);
            }
        });
    for (auto& th : threads) th.join();
    return out;
}

double log2c(double x) { return std::log(std::max(x, 1e-300)) / std::log(2.0); }

std::vector<CMatrix> cq_b_marginal(const CqState& cq) {
    std::vector<CMatrix> marg;
    for (int j = 0; j < cq.b.num_blocks(); ++j)
        marg.push_back(CMatrix::zero(cq.b.block(j).dim, cq.b.block(j).dim));
    for (const auto& part : cq.parts)
        for (int j = 0; j < cq.b.num_blocks(); ++j) marg[static_cast<size_t>(j)] += part[static_cast<size_t>(j)];
    return marg;
}

}  // namespace

Conditional embed_cq_quantum(const CqState& cq) {
    Conditional c;
    const int nx = static_cast<int>(cq.alphabet.size());
    for (int j = 0; j < cq.b.num_blocks(); ++j) c.b_dims.push_back(cq.b.block(j).dim);
    for (int j = 0; j < cq.b.num_blocks(); ++j) {
        const int nb = cq.b.block(j).dim;
        CMatrix dens(nx * nb, nx * nb);
        for (int x = 0; x < nx; ++x) {
            const CMatrix& part = cq.parts[static_cast<size_t>(x)][static_cast<size_t>(j)];
            for (int p = 0; p < nb; ++p)
                for (int q = 0; q < nb; ++q) dens(x * nb + p, x * nb + q) = part(p, q);
        }
        c.cells.push_back({nx, j, dens});
    }
    return c;
}

// ---------------------------------------------------------------------------
// privacy amplification

PaReport pa_run(const CqState& omega, int key_bits, const hashing::HashFamily& fam,
                hashing::EnumMode mode, int sample_count, double eps,
                const sdp::SolveOptions& opts) {
    if (fam.range_bits != key_bits)
        throw hashing::AlphabetMismatch("pa_run: family range does not match key_bits");
    if ((1ULL << fam.domain_bits) != omega.alphabet.size())
        throw hashing::AlphabetMismatch("pa_run: cq alphabet is not {0,1}^a");

    auto fns = hashing::enumerate_or_sample(fam, mode, sample_count);
    const double inv_k = 1.0 / static_cast<double>(1ULL << key_bits);
    auto marg = cq_b_marginal(omega);

    auto distances = parallel_map(fns.size(), [&](std::size_t i) {
        CqState hashed = hashing::apply_tf(fns[i], omega);
        double dist = 0;
        for (size_t k = 0; k < hashed.parts.size(); ++k)
            for (int j = 0; j < omega.b.num_blocks(); ++j) {
                CMatrix diff = hashed.parts[k][static_cast<size_t>(j)];
                CMatrix scaled_marg = marg[static_cast<size_t>(j)];
                scaled_marg *= linalg::cplx(inv_k, 0);
                diff -= scaled_marg;
                dist += linalg::trace_norm(diff);
            }
        return dist;
    });

    PaReport rep;
    rep.epsilon = eps;
    rep.key_size = 1ULL << key_bits;
    rep.exact = (mode == hashing::EnumMode::Exact);
    double sum = 0, sumsq = 0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        sum += distances[i];
        sumsq += distances[i] * distances[i];
        if (distances[i] < distances[best]) best = i;
    }
    const double n = static_cast<double>(distances.size());
    rep.avg_distance = sum / n;
    if (!rep.exact && distances.size() > 1) {
        double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0));
        rep.stderr_mc = std::sqrt(var / n);
    }
    rep.best_f = fns[best];
    rep.best_distance = distances[best];

    entropy::EntropyResult h = entropy::hmin_smooth(Conditional::from_cq(omega), eps, opts);
    rep.hmin_bits = h.value;
    // certified lower end of the bracket keeps the bound conservative
    rep.bound = std::sqrt(static_cast<double>(rep.key_size) * std::pow(2.0, -h.lo));
    if (eps > 0) rep.bound += 4.0 * eps;

    double slack = rep.exact ? 1e-9 : 3.0 * rep.stderr_mc + 1e-9;
    if (rep.avg_distance > rep.bound + slack)
        throw BoundViolated("pa_run: E_F distance " + std::to_string(rep.avg_distance) +
                            " exceeds bound " + std::to_string(rep.bound));
    return rep;
}

PaKeyLength pa_key_length(const CqState& omega, double eps, const sdp::SolveOptions& opts) {
    if (eps <= 0 || eps >= 1) throw sdp::IllFormed("pa_key_length: eps must be in (0,1)");
    Conditional c = Conditional::from_cq(omega);
    PaKeyLength out;
    entropy::EntropyResult h5 = entropy::hmin_smooth(c, eps / 5.0, opts);
    out.hmin_eps5 = h5.value;
    out.achievable_log = h5.value - 2.0 * log2c(5.0 / eps);
    double k = std::floor(std::pow(2.0, out.achievable_log));
    out.achievable = k < 0.0 ? 0 : static_cast<std::uint64_t>(k);
    entropy::EntropyResult hconv = entropy::hmin_smooth(c, std::sqrt(eps), opts);
    out.converse_log = hconv.value;
    if (out.achievable_log > out.converse_log + 1e-6)
        throw BoundViolated("pa_key_length: achievable exceeds the converse cap");
    return out;
}

// ---------------------------------------------------------------------------
// data compression

namespace {

struct PgmParts {
    // support projections of the positive part of omega^x - omega/(2|C|)
    std::vector<std::vector<CMatrix>> pi;  // [x][block]
};

// Projector onto eigenvalues > -margin: exact boundary ties (which occur for
// symmetric classical sources) count as part of the positive support, so the
// degenerate ensemble decodes as an equal-weight pretty-good measurement.
CMatrix inclusive_positive_projector(const CMatrix& herm, double margin) {
    auto e = linalg::herm_eig(herm, 1e-8);
    CMatrix p(herm.rows(), herm.cols());
    for (size_t k = 0; k < e.values.size(); ++k) {
        if (e.values[k] <= -margin) continue;
        for (int i = 0; i < herm.rows(); ++i)
            for (int j = 0; j < herm.cols(); ++j)
                p(i, j) += e.vectors(i, static_cast<int>(k)) *
                           std::conj(e.vectors(j, static_cast<int>(k)));
    }
    return p;
}

PgmParts build_projections(const CqState& omega, std::uint64_t message_size) {
    PgmParts out;
    auto marg = cq_b_marginal(omega);
    const double scale = 1.0 / (2.0 * static_cast<double>(message_size));
    for (size_t x = 0; x < omega.parts.size(); ++x) {
        std::vector<CMatrix> blocks;
        for (int j = 0; j < omega.b.num_blocks(); ++j) {
            CMatrix diff = omega.parts[x][static_cast<size_t>(j)];
            CMatrix m = marg[static_cast<size_t>(j)];
            m *= linalg::cplx(scale, 0);
            diff -= m;
            blocks.push_back(inclusive_positive_projector(diff, 1e-12));
        }
        out.pi.push_back(std::move(blocks));
    }
    return out;
}

// p_err for one encoder; optionally exports the decoder POVMs.
double pgm_perr(const CqState& omega, const PgmParts& pgm, const hashing::HashFn& f,
                std::vector<Povm>* decoder_out) {
    const std::uint64_t nx = omega.alphabet.size();
    const std::uint64_t nc = 1ULL << f.range_bits;
    double success = 0;
    for (std::uint64_t c = 0; c < nc; ++c) {
        std::vector<std::uint64_t> bucket;
        for (std::uint64_t x = 0; x < nx; ++x)
            if (f.apply(x) == c) bucket.push_back(x);
        // Q = sum of projections in the bucket; D_x = Q^{+1/2} Pi_x Q^{+1/2}
        std::vector<CMatrix> qinv_half;
        for (int j = 0; j < omega.b.num_blocks(); ++j) {
            CMatrix q = CMatrix::zero(omega.b.block(j).dim, omega.b.block(j).dim);
            for (auto x : bucket) q += pgm.pi[static_cast<size_t>(x)][static_cast<size_t>(j)];
            qinv_half.push_back(linalg::psd_pow(q, -0.5, 1e-8));
        }
        std::vector<std::vector<CMatrix>> decoder_elems;
        for (auto x : bucket) {
            std::vector<CMatrix> dx;
            double ok = 0;
            for (int j = 0; j < omega.b.num_blocks(); ++j) {
                CMatrix d = qinv_half[static_cast<size_t>(j)] *
                            pgm.pi[static_cast<size_t>(x)][static_cast<size_t>(j)] *
                            qinv_half[static_cast<size_t>(j)];
                ok += (omega.parts[static_cast<size_t>(x)][static_cast<size_t>(j)] * d)
                          .trace()
                          .real();
                dx.push_back(d);
            }
            success += ok;
            if (decoder_out) decoder_elems.push_back(std::move(dx));
        }
        if (decoder_out) {
            // complete the (possibly incomplete) measurement with an abort outcome
            std::vector<std::string> outcomes;
            std::vector<states::AlgebraElement> elements;
            std::vector<CMatrix> rest;
            for (int j = 0; j < omega.b.num_blocks(); ++j)
                rest.push_back(CMatrix::identity(omega.b.block(j).dim));
            for (size_t bi = 0; bi < bucket.size(); ++bi) {
                outcomes.push_back(std::to_string(bucket[bi]));
                states::AlgebraElement e;
                e.algebra = nullptr;
                e.block_matrices = decoder_elems[bi];
                for (int j = 0; j < omega.b.num_blocks(); ++j)
                    rest[static_cast<size_t>(j)] -= decoder_elems[bi][static_cast<size_t>(j)];
                elements.push_back(std::move(e));
            }
            outcomes.push_back("abort");
            states::AlgebraElement eab;
            eab.block_matrices = rest;
            elements.push_back(std::move(eab));
            Povm p;
            p.algebra = omega.b;
            p.outcomes = std::move(outcomes);
            p.elements = std::move(elements);
            for (auto& e : p.elements) e.algebra = &p.algebra;
            decoder_out->push_back(std::move(p));
        }
    }
    return 1.0 - success;
}

}  // namespace

DcReport dc_build(const CqState& omega, const hashing::HashFamily& fam, hashing::EnumMode mode,
                  int sample_count, const sdp::SolveOptions& opts) {
    if ((1ULL << fam.domain_bits) != omega.alphabet.size())
        throw hashing::AlphabetMismatch("dc_build: cq alphabet is not {0,1}^a");
    DcReport rep;
    rep.message_size = 1ULL << fam.range_bits;

    PgmParts pgm = build_projections(omega, rep.message_size);
    auto fns = hashing::enumerate_or_sample(fam, mode, sample_count);
    auto errs =
        parallel_map(fns.size(), [&](std::size_t i) { return pgm_perr(omega, pgm, fns[i], nullptr); });
    std::size_t best = 0;
    double sum = 0;
    for (std::size_t i = 0; i < errs.size(); ++i) {
        sum += errs[i];
        if (errs[i] < errs[best]) best = i;
    }
    rep.avg_p_err = sum / static_cast<double>(errs.size());
    rep.encoder = fns[best];
    rep.p_err = pgm_perr(omega, pgm, fns[best], &rep.decoder);

    entropy::EntropyResult h = entropy::hmax(embed_cq_quantum(omega), opts);
    rep.hmax_bits = h.value;
    rep.bound =
        std::sqrt(std::pow(2.0, h.hi + 3.0) / static_cast<double>(rep.message_size));
    if (rep.avg_p_err > rep.bound + 1e-9)
        throw BoundViolated("dc_build: averaged p_err " + std::to_string(rep.avg_p_err) +
                            " exceeds bound " + std::to_string(rep.bound));
    return rep;
}

DcMessageLength dc_message_length(const CqState& omega, double eps,
                                  const sdp::SolveOptions& opts) {
    if (eps <= 0 || eps >= 1) throw sdp::IllFormed("dc_message_length: eps must be in (0,1)");
    Conditional c = embed_cq_quantum(omega);
    DcMessageLength out;
    entropy::EntropyResult h2 = entropy::hmax_smooth(c, eps / 2.0, opts);
    out.hmax_eps2 = h2.value;
    out.message_log = h2.value + 2.0 * log2c(1.0 / eps) + 6.0;
    out.message_size = static_cast<std::uint64_t>(std::ceil(std::pow(2.0, out.message_log)));
    entropy::EntropyResult hc = entropy::hmax_smooth(c, std::sqrt(2.0 * eps), opts);
    out.converse_log = hc.value;
    return out;
}

// ---------------------------------------------------------------------------
// uncertainty

namespace {

// state on tensor(a, c) from a state on tensor(tensor(a, b), c), tracing the
// middle factor
State restrict_middle(const State& s, const algebra::Algebra& a, const algebra::Algebra& b,
                      const algebra::Algebra& c) {
    algebra::Algebra ac = algebra::tensor(a, c);
    std::vector<CMatrix> dens;
    for (int i = 0; i < a.num_blocks(); ++i)
        for (int k = 0; k < c.num_blocks(); ++k)
            dens.push_back(CMatrix::zero(a.block(i).dim * c.block(k).dim,
                                         a.block(i).dim * c.block(k).dim));
    for (int i = 0; i < a.num_blocks(); ++i)
        for (int j = 0; j < b.num_blocks(); ++j)
            for (int k = 0; k < c.num_blocks(); ++k) {
                int flat = (i * b.num_blocks() + j) * c.num_blocks() + k;
                const CMatrix& r = s.density(flat);
                const int na = a.block(i).dim, nb = b.block(j).dim, nc = c.block(k).dim;
                CMatrix& d = dens[static_cast<size_t>(i * c.num_blocks() + k)];
                for (int al = 0; al < na; ++al)
                    for (int al2 = 0; al2 < na; ++al2)
                        for (int g = 0; g < nc; ++g)
                            for (int g2 = 0; g2 < nc; ++g2) {
                                linalg::cplx acc = 0;
                                for (int be = 0; be < nb; ++be)
                                    acc += r((al * nb + be) * nc + g, (al2 * nb + be) * nc + g2);
                                d(al * nc + g, al2 * nc + g2) += acc;
                            }
            }
    return State(ac, std::move(dens));
}

}  // namespace

double povm_overlap(const Povm& x, const Povm& y) {
    double c = 0;
    for (const auto& ex : x.elements)
        for (const auto& fy : y.elements) {
            for (size_t k = 0; k < ex.block_matrices.size(); ++k) {
                CMatrix se = linalg::psd_sqrt(ex.block_matrices[k], 1e-8);
                CMatrix sf = linalg::psd_sqrt(fy.block_matrices[k], 1e-8);
                double n = linalg::op_norm(se * sf);
                c = std::max(c, n * n);
            }
        }
    return c;
}

UncertaintyReport uncertainty_check(const State& omega_abc, const algebra::Algebra& a,
                                    const algebra::Algebra& b, const algebra::Algebra& c,
                                    const Povm& povm_x, const Povm& povm_y, double eps,
                                    const sdp::SolveOptions& opts) {
    algebra::Algebra ab = algebra::tensor(a, b);
    State s_ab = states::restrict(omega_abc, ab, c, states::Keep::First);
    State s_ac = restrict_middle(omega_abc, a, b, c);

    CqState omega_xb = states::cq_from_measurement(s_ab, a, b, povm_x);
    CqState omega_yc = states::cq_from_measurement(s_ac, a, c, povm_y);

    UncertaintyReport rep;
    entropy::EntropyResult hmin_xb =
        entropy::hmin_smooth(Conditional::from_cq(omega_xb), eps, opts);
    entropy::EntropyResult hmax_yc =
        entropy::hmax_smooth(embed_cq_quantum(omega_yc), eps, opts);
    rep.hmin_xb = hmin_xb.value;
    rep.hmax_yc = hmax_yc.value;
    rep.lhs = hmin_xb.value + hmax_yc.value;
    rep.overlap_c = povm_overlap(povm_x, povm_y);
    rep.rhs = -log2c(rep.overlap_c);
    rep.holds = rep.lhs >= rep.rhs - 1e-6;
    return rep;
}

Isometry povm_isometry(const Povm& povm) {
    if (povm.algebra.num_blocks() != 1 || povm.algebra.block(0).multiplicity != 1)
        throw NotIsometry("povm_isometry: POVM must live on a full matrix algebra");
    const int h = povm.algebra.block(0).dim;
    const int n = static_cast<int>(povm.elements.size());
    Isometry iso;
    iso.n = n;
    iso.d = n;
    iso.h = h;
    iso.m = CMatrix(n * n * h, h);
    for (int x = 0; x < n; ++x) {
        CMatrix root = linalg::psd_sqrt(povm.elements[static_cast<size_t>(x)].block_matrices[0], 1e-8);
        for (int r = 0; r < h; ++r)
            for (int s = 0; s < h; ++s) iso.m((x * n + x) * h + r, s) = root(r, s);
    }
    return iso;
}

double uncertainty_choi_constant(const Isometry& u, const Isometry& v, double tol) {
    if (u.m.cols() != u.h || u.m.rows() != u.n * u.d * u.h)
        throw NotIsometry("uncertainty_choi_constant: U shape mismatch");
    if (v.m.cols() != v.h || v.m.rows() != v.n * v.d * v.h)
        throw NotIsometry("uncertainty_choi_constant: V shape mismatch");
    if (u.h != v.h) throw NotIsometry("uncertainty_choi_constant: mismatched base space");
    auto check_iso = [&](const CMatrix& m, int h) {
        CMatrix g = m.adjoint() * m;
        if (linalg::op_norm(g - CMatrix::identity(h)) > tol * 10)
            throw NotIsometry("uncertainty_choi_constant: not an isometry");
    };
    check_iso(u.m, u.h);
    check_iso(v.m, v.h);

    // W = U V^dagger maps C^{n d h} -> C^{n' d' h}; the Choi matrix lives on
    // C^d (x) C^{n'} (x) C^h with entries
    //   M[(k,i,r),(l,j,s)] = sum_{m,p,t} W[(i,m,r),(p,k,t)] conj(W[(j,m,s),(p,l,t)]).
    CMatrix w = u.m * v.m.adjoint();
    const int n2 = u.n, d2 = u.d, n1 = v.n, d1 = v.d, h = u.h;
    const int dim = d1 * n2 * h;
    CMatrix choi(dim, dim);
    for (int k = 0; k < d1; ++k)
        for (int i = 0; i < n2; ++i)
            for (int r = 0; r < h; ++r)
                for (int l = 0; l < d1; ++l)
                    for (int j = 0; j < n2; ++j)
                        for (int s = 0; s < h; ++s) {
                            linalg::cplx acc = 0;
                            for (int m = 0; m < d2; ++m)
                                for (int p = 0; p < n1; ++p)
                                    for (int t = 0; t < h; ++t)
                                        acc += w((i * d2 + m) * h + r, (p * d1 + k) * h + t) *
                                               std::conj(w((j * d2 + m) * h + s,
                                                           (p * d1 + l) * h + t));
                            choi((k * n2 + i) * h + r, (l * n2 + j) * h + s) = acc;
                        }
    return linalg::op_norm(choi);
}

// ---------------------------------------------------------------------------
// key distillation

CqState cq_restrict(const CqState& omega_x_be, const algebra::Algebra& b,
                    const algebra::Algebra& e, states::Keep keep) {
    const algebra::Algebra& out_alg = (keep == states::Keep::First) ? b : e;
    CqState out;
    out.alphabet = omega_x_be.alphabet;
    out.b = out_alg;
    for (const auto& part : omega_x_be.parts) {
        std::vector<CMatrix> blocks;
        for (int j = 0; j < out_alg.num_blocks(); ++j)
            blocks.push_back(CMatrix::zero(out_alg.block(j).dim, out_alg.block(j).dim));
        for (int i = 0; i < b.num_blocks(); ++i)
            for (int j = 0; j < e.num_blocks(); ++j) {
                int flat = i * e.num_blocks() + j;
                if (keep == states::Keep::First)
                    blocks[static_cast<size_t>(i)] += linalg::partial_trace(
                        part[static_cast<size_t>(flat)], 0, b.block(i).dim, e.block(j).dim);
                else
                    blocks[static_cast<size_t>(j)] += linalg::partial_trace(
                        part[static_cast<size_t>(flat)], 1, b.block(i).dim, e.block(j).dim);
            }
        out.parts.push_back(std::move(blocks));
    }
    return out;
}

QkdReport qkd_key_bounds(const CqState& omega_x_be, const algebra::Algebra& b,
                         const algebra::Algebra& e, double eps1, double eps2,
                         const sdp::SolveOptions& opts) {
    if (eps1 <= 0 || eps2 <= 0 || eps1 + eps2 >= 1)
        throw sdp::IllFormed("qkd_key_bounds: need eps1, eps2 > 0 with eps1 + eps2 < 1");
    CqState omega_xe = cq_restrict(omega_x_be, b, e, states::Keep::Second);
    CqState omega_xb = cq_restrict(omega_x_be, b, e, states::Keep::First);

    QkdReport rep;
    entropy::EntropyResult hmin_xe =
        entropy::hmin_smooth(Conditional::from_cq(omega_xe), eps1 / 5.0, opts);
    entropy::EntropyResult hmax_xb =
        entropy::hmax_smooth(embed_cq_quantum(omega_xb), eps2 / 4.0, opts);
    rep.hmin_xe = hmin_xe.value;
    rep.hmax_xb = hmax_xb.value;
    rep.achievable_log = hmin_xe.value - hmax_xb.value - 2.0 * log2c(80.0 / (eps1 * eps2));
    double k = std::floor(std::pow(2.0, rep.achievable_log));
    rep.achievable = k < 0.0 ? 0 : static_cast<std::uint64_t>(k);

    double eps = eps1 + eps2;
    entropy::EntropyResult hmin_c =
        entropy::hmin_smooth(Conditional::from_cq(omega_xe), std::sqrt(2.0 * eps), opts);
    entropy::EntropyResult hmax_c =
        entropy::hmax_smooth(embed_cq_quantum(omega_xb), std::sqrt(2.0 * eps), opts);
    rep.converse_log = hmin_c.value - hmax_c.value;
    if (rep.achievable_log > rep.converse_log + 1e-6)
        throw BoundViolated("qkd_key_bounds: achievable exceeds converse");
    return rep;
}

}  // namespace vna::protocols

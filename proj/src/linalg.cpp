#include "vna/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vna::linalg {

CMatrix CMatrix::adjoint() const {
    CMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

CMatrix CMatrix::transpose() const {
    CMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

CMatrix CMatrix::conj() const {
    CMatrix r(rows_, cols_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = std::conj(a_[k]);
    return r;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimMismatch("matrix add: shape mismatch");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimMismatch("matrix sub: shape mismatch");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (auto& v : a_) v *= s;
    return *this;
}

cplx CMatrix::trace() const {
    cplx t = 0;
    for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::frobenius_norm() const {
    double s = 0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

bool CMatrix::is_hermitian(double tol) const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = i; j < cols_; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
    return true;
}

bool CMatrix::is_psd(double tol) const {
    if (!is_hermitian(tol)) return false;
    auto eig = herm_eig(*this, tol);
    return eig.values.empty() || eig.values.back() >= -tol;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw DimMismatch("matrix mul: inner dimension mismatch");
    CMatrix r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0)) continue;
            for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    }
    return r;
}

CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

namespace {

double offdiag_mass(const CMatrix& a) {
    double s = 0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace

EigResult herm_eig(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) throw DimMismatch("herm_eig: matrix not square");
    const int n = m.rows();
    // Hermiticity gate relative to scale.
    double herm_dev = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            herm_dev = std::max(herm_dev, std::abs(m(i, j) - std::conj(m(j, i))));
    const double scale = std::max(1.0, m.frobenius_norm());
    if (herm_dev > tol * scale)
        throw NonHermitian("herm_eig: ||m - m^dagger|| = " + std::to_string(herm_dev));

    CMatrix a = m;
    // Symmetrize exactly so rounding in the input cannot bias sweeps.
    for (int i = 0; i < n; ++i) {
        a(i, i) = cplx(a(i, i).real(), 0.0);
        for (int j = i + 1; j < n; ++j) {
            cplx v = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
    }
    CMatrix v = CMatrix::identity(n);

    const double fnorm = std::max(a.frobenius_norm(), 1e-300);
    const double target = 1e-14 * fnorm;
    const int max_sweeps = 60;
    int sweeps = 0;
    while (offdiag_mass(a) > target) {
        if (++sweeps > max_sweeps)
            throw NoConvergence("herm_eig: Jacobi did not converge", sweeps);
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double beta = std::abs(apq);
                if (beta <= 1e-300) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Phase so the 2x2 subproblem becomes real, then a classical rotation.
                const cplx phase = apq / beta;  // e^{i phi}
                const double tau = (aqq - app) / (2.0 * beta);
                double t;
                if (tau >= 0)
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Unitary on columns (p,q): [[c, s], [-s conj(phase), c conj(phase)]]
                const cplx g10 = -s * std::conj(phase);
                const cplx g11 = c * std::conj(phase);
                // A <- V2^dagger A V2, columns then rows.
                for (int i = 0; i < n; ++i) {
                    const cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip + g10 * aiq;
                    a(i, q) = s * aip + g11 * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    const cplx apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj + std::conj(g10) * aqj;
                    a(q, j) = s * apj + std::conj(g11) * aqj;
                }
                for (int i = 0; i < n; ++i) {
                    const cplx vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip + g10 * viq;
                    v(i, q) = s * vip + g11 * viq;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = cplx(a(p, p).real(), 0.0);
                a(q, q) = cplx(a(q, q).real(), 0.0);
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return a(i, i).real() > a(j, j).real();
    });
    EigResult r;
    r.values.resize(n);
    r.vectors = CMatrix(n, n);
    for (int k = 0; k < n; ++k) {
        r.values[k] = a(order[k], order[k]).real();
        for (int i = 0; i < n; ++i) r.vectors(i, k) = v(i, order[k]);
    }
    return r;
}

namespace {

CMatrix eig_apply(const EigResult& e, const std::vector<double>& f) {
    const int n = static_cast<int>(e.values.size());
    CMatrix r(n, n);
    for (int k = 0; k < n; ++k) {
        if (f[k] == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            const cplx vik = e.vectors(i, k) * f[k];
            for (int j = 0; j < n; ++j) r(i, j) += vik * std::conj(e.vectors(j, k));
        }
    }
    return r;
}

}  // namespace

CMatrix psd_sqrt(const CMatrix& m, double tol) {
    auto e = herm_eig(m, tol);
    const double scale = e.values.empty() ? 0.0 : std::max(std::abs(e.values.front()), 1.0);
    std::vector<double> f(e.values.size());
    for (size_t k = 0; k < e.values.size(); ++k) {
        double lam = e.values[k];
        if (lam < -tol * scale)
            throw NotPsd("psd_sqrt: eigenvalue " + std::to_string(lam) + " below -tol");
        f[k] = lam > 0 ? std::sqrt(lam) : 0.0;
    }
    return eig_apply(e, f);
}

CMatrix psd_pow(const CMatrix& m, double p, double tol, double rel_cutoff) {
    auto e = herm_eig(m, tol);
    double lmax = 0;
    for (double lam : e.values) lmax = std::max(lmax, lam);
    const double scale = std::max(std::abs(lmax), 1.0);
    const double cut = rel_cutoff * std::max(lmax, 0.0);
    std::vector<double> f(e.values.size());
    for (size_t k = 0; k < e.values.size(); ++k) {
        double lam = e.values[k];
        if (lam < -tol * scale) throw NotPsd("psd_pow: matrix not PSD");
        f[k] = (lam > cut && lam > 0) ? std::pow(lam, p) : 0.0;
    }
    return eig_apply(e, f);
}

CMatrix support_projector(const CMatrix& psd, double tol, double rel_cutoff) {
    auto e = herm_eig(psd, tol);
    double lmax = 0;
    for (double lam : e.values) lmax = std::max(lmax, lam);
    const double cut = rel_cutoff * std::max(lmax, 0.0);
    std::vector<double> f(e.values.size());
    for (size_t k = 0; k < e.values.size(); ++k) f[k] = e.values[k] > cut ? 1.0 : 0.0;
    return eig_apply(e, f);
}

CMatrix positive_part_projector(const CMatrix& herm, double tol) {
    auto e = herm_eig(herm, tol);
    std::vector<double> f(e.values.size());
    for (size_t k = 0; k < e.values.size(); ++k) f[k] = e.values[k] > 0.0 ? 1.0 : 0.0;
    return eig_apply(e, f);
}

double trace_norm(const CMatrix& m) {
    if (m.rows() != m.cols()) throw DimMismatch("trace_norm: matrix not square");
    if (m.is_hermitian(1e-12 * std::max(1.0, m.frobenius_norm()))) {
        auto e = herm_eig(m, 1e-9);
        double s = 0;
        for (double lam : e.values) s += std::abs(lam);
        return s;
    }
    auto e = herm_eig(m.adjoint() * m, 1e-9);
    double s = 0;
    for (double lam : e.values) s += std::sqrt(std::max(0.0, lam));
    return s;
}

double op_norm(const CMatrix& m) {
    CMatrix g = m.adjoint() * m;
    auto e = herm_eig(g, 1e-9);
    double lmax = 0;
    for (double lam : e.values) lmax = std::max(lmax, lam);
    return std::sqrt(std::max(0.0, lmax));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0)) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return r;
}

CMatrix partial_trace(const CMatrix& m, int keep, int dA, int dB) {
    if (m.rows() != m.cols() || m.rows() != dA * dB)
        throw DimMismatch("partial_trace: dims do not factor the matrix");
    if (keep == 0) {
        CMatrix r(dA, dA);
        for (int i = 0; i < dA; ++i)
            for (int j = 0; j < dA; ++j) {
                cplx s = 0;
                for (int k = 0; k < dB; ++k) s += m(i * dB + k, j * dB + k);
                r(i, j) = s;
            }
        return r;
    }
    CMatrix r(dB, dB);
    for (int k = 0; k < dB; ++k)
        for (int l = 0; l < dB; ++l) {
            cplx s = 0;
            for (int i = 0; i < dA; ++i) s += m(i * dB + k, i * dB + l);
            r(k, l) = s;
        }
    return r;
}

CMatrix partial_trace_with(const CMatrix& m, const CMatrix& op, int dA, int dB) {
    if (m.rows() != dA * dB || op.rows() != dB || op.cols() != dB)
        throw DimMismatch("partial_trace_with: shape mismatch");
    // Tr_B[m (1 (x) op)](i,j) = sum_{k,l} m[(i,k),(j,l)] op(l,k)
    CMatrix r(dA, dA);
    for (int i = 0; i < dA; ++i)
        for (int j = 0; j < dA; ++j) {
            cplx s = 0;
            for (int k = 0; k < dB; ++k)
                for (int l = 0; l < dB; ++l) s += m(i * dB + k, j * dB + l) * op(l, k);
            r(i, j) = s;
        }
    return r;
}

cplx hs_inner(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimMismatch("hs_inner: shape mismatch");
    cplx s = 0;
    for (size_t k = 0; k < a.data().size(); ++k) s += std::conj(a.data()[k]) * b.data()[k];
    return s;
}

}  // namespace vna::linalg

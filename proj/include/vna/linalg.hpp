#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

// Dense complex-matrix kernel shared by every other module. Dimensions here
// stay small (a few hundred at most), so everything is plain row-major
// storage and O(n^3) algorithms with deterministic iteration order.

namespace vna::linalg {

using cplx = std::complex<double>;

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};
struct NonHermitian : Error {
    explicit NonHermitian(const std::string& msg) : Error(msg) {}
};
struct NoConvergence : Error {
    int iterations;
    NoConvergence(const std::string& msg, int iters) : Error(msg), iterations(iters) {}
};
struct NotPsd : Error {
    explicit NotPsd(const std::string& msg) : Error(msg) {}
};
struct DimMismatch : Error {
    explicit DimMismatch(const std::string& msg) : Error(msg) {}
};

class CMatrix {
public:
    CMatrix() : rows_(0), cols_(0) {}
    CMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

    static CMatrix identity(int n) {
        CMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static CMatrix zero(int rows, int cols) { return CMatrix(rows, cols); }
    static CMatrix diag(const std::vector<double>& d) {
        CMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return a_.empty(); }

    cplx& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const cplx& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    CMatrix adjoint() const;
    CMatrix transpose() const;
    CMatrix conj() const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

    cplx trace() const;
    double frobenius_norm() const;

    bool is_hermitian(double tol = 1e-9) const;
    bool is_psd(double tol = 1e-9) const;

private:
    int rows_, cols_;
    std::vector<cplx> a_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
/// m = vectors * diag(values) * vectors^dagger.
struct EigResult {
    std::vector<double> values;
    CMatrix vectors;
};

/// Cyclic Jacobi with deterministic sweep order; converges when the
/// off-diagonal Frobenius mass drops below 1e-14 * ||m||_F.
EigResult herm_eig(const CMatrix& m, double tol = 1e-9);

/// PSD square root. Eigenvalues in [-tol, 0) are clamped to zero, anything
/// below -tol is a genuine indefiniteness and raises NotPsd.
CMatrix psd_sqrt(const CMatrix& m, double tol = 1e-9);

/// f(m) on the support: eigenvalues below rel_cutoff * lambda_max are treated
/// as zero (pseudo-inverse style powers); p may be negative.
CMatrix psd_pow(const CMatrix& m, double p, double tol = 1e-9, double rel_cutoff = 1e-10);

/// Projector onto the span of eigenvectors with eigenvalue > rel_cutoff * lambda_max.
CMatrix support_projector(const CMatrix& psd, double tol = 1e-9, double rel_cutoff = 1e-10);

/// Projector onto the strictly positive part of a Hermitian matrix.
CMatrix positive_part_projector(const CMatrix& herm, double tol = 1e-9);

/// Sum of singular values.
double trace_norm(const CMatrix& m);

/// Largest singular value.
double op_norm(const CMatrix& m);

/// Kronecker product, (A kron B)[(i,k),(j,l)] = A(i,j) B(k,l) with row index i*rowsB + k.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Partial trace of a square matrix on C^dA (x) C^dB; keep = 0 keeps A, 1 keeps B.
CMatrix partial_trace(const CMatrix& m, int keep, int dA, int dB);

/// Tr_B[ m (1 (x) op) ] for m on C^dA (x) C^dB and op on C^dB.
CMatrix partial_trace_with(const CMatrix& m, const CMatrix& op, int dA, int dB);

/// <a, b> = Tr(a^dagger b)
cplx hs_inner(const CMatrix& a, const CMatrix& b);

}  // namespace vna::linalg

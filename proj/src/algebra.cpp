#include "vna/algebra.hpp"

#include <algorithm>

namespace vna::algebra {

Algebra::Algebra(std::vector<Block> blocks, std::string label)
    : blocks_(std::move(blocks)), label_(std::move(label)) {
    if (blocks_.empty()) throw EmptyBlocks("algebra: empty block list");
    offsets_.reserve(blocks_.size());
    for (const auto& b : blocks_) {
        if (b.dim < 1 || b.multiplicity < 1)
            throw ZeroDim("algebra: block dims and multiplicities must be >= 1");
        offsets_.push_back(ambient_dim_);
        ambient_dim_ += b.dim * b.multiplicity;
    }
}

bool Algebra::is_abelian() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](const Block& b) { return b.dim == 1; });
}

bool Algebra::structurally_equal(const Algebra& o) const {
    if (blocks_.size() != o.blocks_.size()) return false;
    auto key = [](const Block& b) { return std::pair<int, int>(b.dim, b.multiplicity); };
    std::vector<std::pair<int, int>> x, y;
    for (const auto& b : blocks_) x.push_back(key(b));
    for (const auto& b : o.blocks_) y.push_back(key(b));
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    return x == y;
}

AlgebraElement AlgebraElement::identity(const Algebra& a) {
    AlgebraElement e;
    e.algebra = &a;
    for (const auto& b : a.blocks()) e.block_matrices.push_back(CMatrix::identity(b.dim));
    return e;
}

AlgebraElement AlgebraElement::zero(const Algebra& a) {
    AlgebraElement e;
    e.algebra = &a;
    for (const auto& b : a.blocks()) e.block_matrices.push_back(CMatrix::zero(b.dim, b.dim));
    return e;
}

Algebra make_algebra(const std::vector<Block>& blocks, const std::string& label) {
    return Algebra(blocks, label);
}

Algebra full_matrix_algebra(int n, const std::string& label) {
    return Algebra({{n, 1}}, label.empty() ? "M_" + std::to_string(n) : label);
}

Algebra classical_algebra(int alphabet_size, const std::string& label) {
    if (alphabet_size < 1) throw ZeroDim("classical_algebra: empty alphabet");
    std::vector<Block> blocks(static_cast<size_t>(alphabet_size), Block{1, 1});
    return Algebra(blocks, label.empty() ? "l_inf(" + std::to_string(alphabet_size) + ")" : label);
}

Algebra trivial_algebra(const std::string& label) {
    return Algebra({{1, 1}}, label.empty() ? "C" : label);
}

Algebra commutant(const Algebra& a) {
    std::vector<Block> blocks;
    for (const auto& b : a.blocks()) blocks.push_back({b.multiplicity, b.dim});
    return Algebra(blocks, a.label() + "'");
}

Algebra center(const Algebra& a) {
    std::vector<Block> blocks;
    for (const auto& b : a.blocks()) blocks.push_back({1, b.dim * b.multiplicity});
    return Algebra(blocks, "Z(" + a.label() + ")");
}

Algebra tensor(const Algebra& a, const Algebra& b) {
    std::vector<Block> blocks;
    for (const auto& ba : a.blocks())
        for (const auto& bb : b.blocks())
            blocks.push_back({ba.dim * bb.dim, ba.multiplicity * bb.multiplicity});
    return Algebra(blocks, a.label() + "(x)" + b.label());
}

int tensor_block_index(const Algebra& a, const Algebra& b, int i, int j) {
    (void)a;
    return i * b.num_blocks() + j;
}

CMatrix embed(const AlgebraElement& x) {
    const Algebra& a = *x.algebra;
    CMatrix m(a.ambient_dim(), a.ambient_dim());
    for (int k = 0; k < a.num_blocks(); ++k) {
        const auto& blk = a.block(k);
        const CMatrix& xk = x.block_matrices[static_cast<size_t>(k)];
        const int off = a.block_offset(k);
        for (int i = 0; i < blk.dim; ++i)
            for (int j = 0; j < blk.dim; ++j)
                for (int t = 0; t < blk.multiplicity; ++t)
                    m(off + i * blk.multiplicity + t, off + j * blk.multiplicity + t) = xk(i, j);
    }
    return m;
}

CMatrix embed_in_commutant_position(const Algebra& a, const AlgebraElement& y) {
    CMatrix m(a.ambient_dim(), a.ambient_dim());
    for (int k = 0; k < a.num_blocks(); ++k) {
        const auto& blk = a.block(k);
        const CMatrix& yk = y.block_matrices[static_cast<size_t>(k)];
        if (yk.rows() != blk.multiplicity)
            throw Error("embed_in_commutant_position: block shape mismatch");
        const int off = a.block_offset(k);
        for (int i = 0; i < blk.dim; ++i)
            for (int s = 0; s < blk.multiplicity; ++s)
                for (int t = 0; t < blk.multiplicity; ++t)
                    m(off + i * blk.multiplicity + s, off + i * blk.multiplicity + t) = yk(s, t);
    }
    return m;
}

bool contains(const Algebra& a, const CMatrix& ambient, double tol, AlgebraElement* projected) {
    if (ambient.rows() != a.ambient_dim() || ambient.cols() != a.ambient_dim())
        throw linalg::DimMismatch("contains: ambient shape mismatch");
    AlgebraElement proj;
    proj.algebra = &a;
    CMatrix rebuilt(a.ambient_dim(), a.ambient_dim());
    for (int k = 0; k < a.num_blocks(); ++k) {
        const auto& blk = a.block(k);
        const int off = a.block_offset(k);
        CMatrix xk(blk.dim, blk.dim);
        for (int i = 0; i < blk.dim; ++i)
            for (int j = 0; j < blk.dim; ++j) {
                linalg::cplx s = 0;
                for (int t = 0; t < blk.multiplicity; ++t)
                    s += ambient(off + i * blk.multiplicity + t, off + j * blk.multiplicity + t);
                xk(i, j) = s / static_cast<double>(blk.multiplicity);
            }
        proj.block_matrices.push_back(xk);
    }
    rebuilt = embed(proj);
    double dev = (rebuilt - ambient).frobenius_norm();
    if (projected) *projected = proj;
    return dev <= tol * std::max(1.0, ambient.frobenius_norm());
}

AlgebraElement tensor_element(const Algebra& ta_tb, const Algebra& a, const Algebra& b,
                              const AlgebraElement& x, const AlgebraElement& y) {
    AlgebraElement e;
    e.algebra = &ta_tb;
    for (int i = 0; i < a.num_blocks(); ++i)
        for (int j = 0; j < b.num_blocks(); ++j)
            e.block_matrices.push_back(linalg::kron(x.block_matrices[static_cast<size_t>(i)],
                                                    y.block_matrices[static_cast<size_t>(j)]));
    return e;
}

}  // namespace vna::algebra

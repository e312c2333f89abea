#pragma once

#include <string>
#include <vector>

#include "vna/linalg.hpp"

// Finite-dimensional von Neumann algebras as direct sums of matrix blocks
// with multiplicities: elements embed into the ambient Hilbert space as
// oplus_k (x_k (x) 1_{m_k}).

namespace vna::algebra {

using linalg::CMatrix;

struct Error : linalg::Error {
    explicit Error(const std::string& msg) : linalg::Error(msg) {}
};
struct EmptyBlocks : Error {
    explicit EmptyBlocks(const std::string& msg) : Error(msg) {}
};
struct ZeroDim : Error {
    explicit ZeroDim(const std::string& msg) : Error(msg) {}
};

struct Block {
    int dim;           // n_k
    int multiplicity;  // m_k
};

class Algebra {
public:
    Algebra() = default;
    Algebra(std::vector<Block> blocks, std::string label);

    const std::vector<Block>& blocks() const { return blocks_; }
    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    const Block& block(int k) const { return blocks_[static_cast<size_t>(k)]; }
    int ambient_dim() const { return ambient_dim_; }
    const std::string& label() const { return label_; }

    bool is_abelian() const;
    bool is_factor() const { return blocks_.size() == 1; }

    /// Order-insensitive structural equality (blocks compared after sorting).
    bool structurally_equal(const Algebra& o) const;

    /// Offset of block k in the ambient direct sum.
    int block_offset(int k) const { return offsets_[static_cast<size_t>(k)]; }

private:
    std::vector<Block> blocks_;
    std::vector<int> offsets_;
    int ambient_dim_ = 0;
    std::string label_;
};

struct AlgebraElement {
    const Algebra* algebra = nullptr;
    std::vector<CMatrix> block_matrices;  // one n_k x n_k matrix per block

    static AlgebraElement identity(const Algebra& a);
    static AlgebraElement zero(const Algebra& a);
};

Algebra make_algebra(const std::vector<Block>& blocks, const std::string& label = "");

/// Full matrix algebra M_n.
Algebra full_matrix_algebra(int n, const std::string& label = "");

/// Classical algebra over an alphabet of the given size.
Algebra classical_algebra(int alphabet_size, const std::string& label = "");

/// Trivial algebra (scalars).
Algebra trivial_algebra(const std::string& label = "");

/// Blocks (m_k, n_k): roles of dimension and multiplicity swap.
Algebra commutant(const Algebra& a);

/// One (1, n_k * m_k) block per original block.
Algebra center(const Algebra& a);

/// Blocks are all pairs, lexicographic in (i, j); pairing order is preserved
/// so states can address the (i, j) component deterministically.
Algebra tensor(const Algebra& a, const Algebra& b);

/// Flat block index of the (i, j) pair block inside tensor(a, b).
int tensor_block_index(const Algebra& a, const Algebra& b, int i, int j);

/// Ambient matrix oplus_k (x_k (x) 1_{m_k}).
CMatrix embed(const AlgebraElement& x);

/// Ambient matrix oplus_k (1_{n_k} (x) y_k): the commutant-position embedding
/// of an element of commutant(a) in a's ambient space.
CMatrix embed_in_commutant_position(const Algebra& a, const AlgebraElement& y);

/// Conditional expectation onto the block-diagonal (x) multiplicity pattern;
/// membership holds when the projection reproduces the input within tol.
bool contains(const Algebra& a, const CMatrix& ambient, double tol = 1e-9,
              AlgebraElement* projected = nullptr);

/// Element of tensor(a, b) from a pair of elements.
AlgebraElement tensor_element(const Algebra& ta_tb, const Algebra& a, const Algebra& b,
                              const AlgebraElement& x, const AlgebraElement& y);

}  // namespace vna::algebra

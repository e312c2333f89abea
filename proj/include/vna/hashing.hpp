#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vna/random.hpp"
#include "vna/states.hpp"

// Two-universal hash families over GF(2) and the induced classical channels
// T_f. Hash evaluation is bit-exact: f(x) = T x over GF(2) with LSB-first bit
// order on both the domain and the range.

namespace vna::hashing {

struct Error : linalg::Error {
    explicit Error(const std::string& msg) : linalg::Error(msg) {}
};
struct FamilyTooLarge : Error {
    explicit FamilyTooLarge(const std::string& msg) : Error(msg) {}
};
struct AlphabetMismatch : Error {
    explicit AlphabetMismatch(const std::string& msg) : Error(msg) {}
};

enum class FamilyKind { Toeplitz, AllLinear };

/// A concrete GF(2)-linear hash {0,1}^a -> {0,1}^b given by row bitmasks.
struct HashFn {
    int domain_bits = 0;
    int range_bits = 0;
    std::vector<std::uint64_t> rows;    // rows[i]: mask over domain bits
    std::int64_t toeplitz_bits = -1;    // defining bits when Toeplitz, else -1

    std::uint64_t apply(std::uint64_t x) const;

    /// Hex serialization; Toeplitz functions serialize their
    /// first-column/first-row bits.
    std::string serialize() const;
};

HashFn deserialize_hash(const std::string& text);

/// Toeplitz T[i][j] = bits[i - j + a - 1] from a + b - 1 defining bits.
HashFn toeplitz_fn(int a, int b, std::uint64_t bits);

struct HashFamily {
    int domain_bits = 0;   // a
    int range_bits = 0;    // b <= a
    FamilyKind kind = FamilyKind::Toeplitz;
    std::uint64_t seed = 0;

    /// log2 of the family size (a+b-1 for Toeplitz, a*b for AllLinear).
    int log2_size() const;

    HashFn member(std::uint64_t index) const;
};

HashFamily make_family(int domain_bits, int range_bits, FamilyKind kind = FamilyKind::Toeplitz,
                       std::uint64_t seed = 0);

enum class EnumMode { Exact, Sample };

/// Exact mode yields the whole family once each (size <= 2^22); sample mode
/// yields n iid draws from the uniform measure, deterministic under the seed.
std::vector<HashFn> enumerate_or_sample(const HashFamily& fam, EnumMode mode, int sample_count = 0);

/// (T_f (x) id)(omega): parts'[k] = sum_{x : f(x) = k} parts[x]. The cq
/// alphabet must have size 2^a with index = LSB-first integer encoding.
states::CqState apply_tf(const HashFn& f, const states::CqState& omega);

/// Exact collision count over the full family for a fixed pair x != y;
/// two-universality is the integer inequality count * 2^b <= family size.
std::uint64_t collision_count(const HashFamily& fam, std::uint64_t x, std::uint64_t y);

}  // namespace vna::hashing

#include "vna/hashing.hpp"

#include <bit>

namespace vna::hashing {

std::uint64_t HashFn::apply(std::uint64_t x) const {
    std::uint64_t out = 0;
    for (int i = 0; i < range_bits; ++i) {
        std::uint64_t parity = std::popcount(rows[static_cast<size_t>(i)] & x) & 1ULL;
        out |= parity << i;
    }
    return out;
}

std::string HashFn::serialize() const {
    char buf[96];
    if (toeplitz_bits >= 0) {
        std::snprintf(buf, sizeof buf, "toeplitz:%dx%d:%llx", domain_bits, range_bits,
                      static_cast<unsigned long long>(toeplitz_bits));
        return buf;
    }
    std::string s = "gf2:" + std::to_string(domain_bits) + "x" + std::to_string(range_bits) + ":";
    for (int i = 0; i < range_bits; ++i) {
        std::snprintf(buf, sizeof buf, "%llx",
                      static_cast<unsigned long long>(rows[static_cast<size_t>(i)]));
        s += buf;
        if (i + 1 < range_bits) s += ".";
    }
    return s;
}

HashFn deserialize_hash(const std::string& text) {
    auto fail = [&]() { throw Error("deserialize_hash: bad format: " + text); };
    size_t c1 = text.find(':');
    size_t c2 = text.find(':', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) fail();
    std::string kind = text.substr(0, c1);
    std::string dims = text.substr(c1 + 1, c2 - c1 - 1);
    std::string payload = text.substr(c2 + 1);
    size_t xp = dims.find('x');
    if (xp == std::string::npos) fail();
    int a = std::stoi(dims.substr(0, xp));
    int b = std::stoi(dims.substr(xp + 1));
    if (kind == "toeplitz") return toeplitz_fn(a, b, std::stoull(payload, nullptr, 16));
    if (kind != "gf2") fail();
    HashFn f;
    f.domain_bits = a;
    f.range_bits = b;
    size_t pos = 0;
    for (int i = 0; i < b; ++i) {
        size_t dot = payload.find('.', pos);
        std::string piece = dot == std::string::npos ? payload.substr(pos) : payload.substr(pos, dot - pos);
        f.rows.push_back(std::stoull(piece, nullptr, 16));
        pos = dot == std::string::npos ? payload.size() : dot + 1;
    }
    return f;
}

HashFn toeplitz_fn(int a, int b, std::uint64_t bits) {
    HashFn f;
    f.domain_bits = a;
    f.range_bits = b;
    for (int i = 0; i < b; ++i) {
        std::uint64_t row = 0;
        for (int j = 0; j < a; ++j) {
            int idx = i - j + a - 1;  // in [0, a+b-1)
            if ((bits >> idx) & 1ULL) row |= 1ULL << j;
        }
        f.rows.push_back(row);
    }
    f.toeplitz_bits = static_cast<std::int64_t>(bits);
    return f;
}

int HashFamily::log2_size() const {
    return kind == FamilyKind::Toeplitz ? domain_bits + range_bits - 1
                                        : domain_bits * range_bits;
}

HashFn HashFamily::member(std::uint64_t index) const {
    if (kind == FamilyKind::Toeplitz) return toeplitz_fn(domain_bits, range_bits, index);
    HashFn f;
    f.domain_bits = domain_bits;
    f.range_bits = range_bits;
    std::uint64_t mask = (domain_bits >= 64) ? ~0ULL : ((1ULL << domain_bits) - 1);
    if (domain_bits * range_bits <= 64) {
        for (int i = 0; i < range_bits; ++i)
            f.rows.push_back((index >> (i * domain_bits)) & mask);
    } else {
        // wide matrices: expand the index deterministically, row by row
        rng::Counter expand(index);
        for (int i = 0; i < range_bits; ++i) f.rows.push_back(expand.next_u64() & mask);
    }
    return f;
}

HashFamily make_family(int domain_bits, int range_bits, FamilyKind kind, std::uint64_t seed) {
    if (domain_bits < 1 || range_bits < 1 || range_bits > domain_bits)
        throw Error("make_family: need 1 <= b <= a");
    HashFamily fam;
    fam.domain_bits = domain_bits;
    fam.range_bits = range_bits;
    fam.kind = kind;
    fam.seed = seed;
    return fam;
}

std::vector<HashFn> enumerate_or_sample(const HashFamily& fam, EnumMode mode, int sample_count) {
    std::vector<HashFn> out;
    if (mode == EnumMode::Exact) {
        int lg = fam.log2_size();
        if (lg > 22)
            throw FamilyTooLarge("enumerate: family has 2^" + std::to_string(lg) + " members");
        std::uint64_t n = 1ULL << lg;
        out.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) out.push_back(fam.member(i));
        return out;
    }
    rng::Counter rng(fam.seed);
    int lg = fam.log2_size();
    out.reserve(static_cast<size_t>(sample_count));
    for (int s = 0; s < sample_count; ++s) {
        std::uint64_t idx = rng.next_u64();
        if (lg < 64) idx &= (1ULL << lg) - 1;
        out.push_back(fam.member(idx));
    }
    return out;
}

states::CqState apply_tf(const HashFn& f, const states::CqState& omega) {
    const std::uint64_t nx = 1ULL << f.domain_bits;
    if (omega.alphabet.size() != nx)
        throw AlphabetMismatch("apply_tf: cq alphabet size != 2^a");
    const std::uint64_t nk = 1ULL << f.range_bits;
    states::CqState out;
    out.b = omega.b;
    for (std::uint64_t k = 0; k < nk; ++k) {
        out.alphabet.push_back(std::to_string(k));
        std::vector<linalg::CMatrix> part;
        for (int j = 0; j < omega.b.num_blocks(); ++j)
            part.push_back(linalg::CMatrix::zero(omega.b.block(j).dim, omega.b.block(j).dim));
        out.parts.push_back(std::move(part));
    }
    for (std::uint64_t x = 0; x < nx; ++x) {
        std::uint64_t k = f.apply(x);
        for (int j = 0; j < omega.b.num_blocks(); ++j)
            out.parts[static_cast<size_t>(k)][static_cast<size_t>(j)] +=
                omega.parts[static_cast<size_t>(x)][static_cast<size_t>(j)];
    }
    return out;
}

std::uint64_t collision_count(const HashFamily& fam, std::uint64_t x, std::uint64_t y) {
    int lg = fam.log2_size();
    if (lg > 22) throw FamilyTooLarge("collision_count: family too large for enumeration");
    std::uint64_t count = 0;
    std::uint64_t n = 1ULL << lg;
    for (std::uint64_t i = 0; i < n; ++i) {
        HashFn f = fam.member(i);
        if (f.apply(x) == f.apply(y)) ++count;
    }
    return count;
}

}  // namespace vna::hashing

#pragma once

#include <cstdint>

namespace purity_mc {

// 128-bit counter for the counter-based generator below.
struct Counter128 {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    friend bool operator==(const Counter128&, const Counter128&) = default;

    Counter128& operator++() {
        if (++lo == 0) ++hi;
        return *this;
    }
    Counter128 operator>>(unsigned s) const {
        // only used with s < 64
        return {(lo >> s) | (hi << (64 - s)), hi >> s};
    }
};

namespace detail {

inline std::uint64_t rotl64(std::uint64_t x, unsigned r) {
    return (x << r) | (x >> (64 - r));
}

struct U64Pair {
    std::uint64_t v0, v1;
};

// Threefry-2x64, 20 rounds (Salmon, Moraes, Dror, Shaw, SC'11).
inline U64Pair threefry2x64_20(std::uint64_t k0, std::uint64_t k1,
                               std::uint64_t c0, std::uint64_t c1) {
    constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ull;
    constexpr unsigned kRot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
    const std::uint64_t ks[3] = {k0, k1, kParity ^ k0 ^ k1};
    std::uint64_t x0 = c0 + ks[0];
    std::uint64_t x1 = c1 + ks[1];
    for (unsigned r = 0; r < 20; ++r) {
        x0 += x1;
        x1 = rotl64(x1, kRot[r % 8]);
        x1 ^= x0;
        if (r % 4 == 3) {
            const unsigned i = (r + 1) / 4;
            x0 += ks[i % 3];
            x1 += ks[(i + 1) % 3] + i;
        }
    }
    return {x0, x1};
}

}  // namespace detail

// Splittable counter-based stream: the value at any counter position is a
// pure function of (seed, stream_id, counter), so replay from a saved state
// is bit-identical and distinct (seed, stream_id) pairs are independent
// streams. Each counter tick yields one uniform; counter bit 0 selects the
// output word of block counter>>1 (the one-block cache only avoids
// recomputing a block for its second word).
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    Counter128 counter{};

    RngStream() = default;
    RngStream(std::uint64_t seed_, std::uint64_t stream_id_, Counter128 base = {})
        : seed(seed_), stream_id(stream_id_), counter(base) {}

  private:
    Counter128 cached_block_{~0ull, ~0ull};
    detail::U64Pair cached_words_{0, 0};
    friend std::uint64_t next_u64(RngStream&);
};

inline std::uint64_t next_u64(RngStream& s) {
    const Counter128 block = s.counter >> 1;
    if (!(block == s.cached_block_)) {
        s.cached_words_ = detail::threefry2x64_20(s.seed, s.stream_id, block.lo, block.hi);
        s.cached_block_ = block;
    }
    const std::uint64_t out = (s.counter.lo & 1) ? s.cached_words_.v1 : s.cached_words_.v0;
    ++s.counter;
    return out;
}

// Uniform on [0, 1) with 53 random bits.
inline double next_uniform(RngStream& s) {
    return static_cast<double>(next_u64(s) >> 11) * 0x1.0p-53;
}

}  // namespace purity_mc

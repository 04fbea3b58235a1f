#pragma once

#include <cmath>
#include <cstdint>

namespace sgdlab {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, step, slot). No state, so replicas can run in parallel
// and a rerun with the same ids reproduces the sequence bit for bit.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

namespace rng_detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

}  // namespace rng_detail

inline std::uint64_t counter_bits(const RngStream& rs, std::uint64_t step, std::uint64_t slot) {
    using rng_detail::mix64;
    std::uint64_t h = mix64(rs.seed + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (rs.stream + 0xd1b54a32d192ed03ULL));
    h = mix64(h ^ (step + 0x8cb92ba72f3d8dd7ULL));
    h = mix64(h ^ (slot + 0x2545f4914f6cdd1dULL));
    return h;
}

// Uniform on the open interval (0,1); never returns 0 or 1, so logs are safe.
inline double uniform01(const RngStream& rs, std::uint64_t step, std::uint64_t slot) {
    const std::uint64_t h = counter_bits(rs, step, slot);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller; consumes slots (2k, 2k+1) for draw index k.
inline double normal01(const RngStream& rs, std::uint64_t step, std::uint64_t pair_index) {
    const double u1 = uniform01(rs, step, 2 * pair_index);
    const double u2 = uniform01(rs, step, 2 * pair_index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Uniform integer in [0, m).
inline std::uint64_t uniform_index(const RngStream& rs, std::uint64_t step, std::uint64_t slot,
                                   std::uint64_t m) {
    // 64-bit multiply-shift; bias is ~m/2^64, irrelevant at our m.
    const std::uint64_t h = counter_bits(rs, step, slot);
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(h) * m) >> 64);
}

}  // namespace sgdlab

#pragma once

#include <cstdint>

namespace conflate {

// Counter-based pseudo-random source: u(seed, stream, counter) is a pure
// function, so any draw can be recomputed independently and batches are
// reproducible byte-for-byte regardless of evaluation order.  Mixing is two
// rounds of the splitmix64 finalizer, which is plenty for statistical use.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t key = mix64(seed ^ (stream * 0xd1342543de82ef95ull));
    return mix64(key ^ (counter * 0x2545f4914f6cdd1dull));
}

// Uniform double in [0, 1), 53 random bits.
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(bits(seed, stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace rng
}  // namespace conflate

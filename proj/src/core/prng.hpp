#pragma once

#include "core/types.hpp"

namespace vdf {

// xorshift64* generator. Trivial to port bit-for-bit, which is what every
// consumer here needs: stream extension, the mutator and injection schedules
// must reproduce exactly from a seed.
struct Xorshift64Star {
    u64 state;

    explicit Xorshift64Star(u64 seed)
        : state(seed ? seed : 0x9E3779B97F4A7C15ull) {}

    u64 next() {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        return state * 0x2545F4914F6CDD1Dull;
    }

    u32 next_u32() { return static_cast<u32>(next() >> 32); }

    // Uniform in [lo, hi], hi inclusive. Modulo bias is irrelevant at the
    // ranges used here (intervals well below 2^32).
    u64 range(u64 lo, u64 hi) {
        return lo + next() % (hi - lo + 1);
    }
};

// splitmix64 finalizer; used to derive independent seeds from (seed, salt)
// pairs so subsystems do not share generator state.
inline u64 mix64(u64 a, u64 b) {
    u64 z = a + 0x9E3779B97F4A7C15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace vdf

#pragma once

#include <cstdint>
#include <initializer_list>

namespace agb {

/** SplitMix64 finalizer: a fixed 64-bit mixing permutation. */
inline uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/** Derives a stream id from a seed and a path of labels, so that independent
 *  consumers (round i, estimate j, ...) get decorrelated streams. */
inline uint64_t derive_stream(uint64_t seed, std::initializer_list<uint64_t> path) {
    uint64_t s = mix64(seed ^ 0xA5A5A5A5DEADBEEFull);
    for (uint64_t p : path) s = mix64(s ^ mix64(p + 0x1234));
    return s;
}

/** Counter-based generator: output k depends only on (seed, stream, k), so any
 *  consumer's draws are reproducible without replaying earlier consumers.
 *  Platform-independent by construction (no library distributions involved). */
class CounterRng {
  public:
    CounterRng(uint64_t seed, uint64_t stream) : base_(mix64(seed) ^ mix64(stream)), counter_(0) {}

    uint64_t next_u64() { return mix64(base_ + 0x632BE59BD9B4E019ull * ++counter_); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), unbiased (rejection sampling).
    uint64_t next_below(uint64_t bound) {
        if (bound == 0) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % bound;
    }

    /// ±1 coin with Pr[+1] = p.
    int next_pm1(double p) { return next_unit() < p ? +1 : -1; }

  private:
    uint64_t base_;
    uint64_t counter_;
};

}  // namespace agb

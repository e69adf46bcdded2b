// rng.hpp - pinned PRNG for the whole workbench: xoshiro256** seeded via
// splitmix64. Determinism is promised within this repo, not across
// reimplementations.
#pragma once

#include <cstdint>

namespace evobench {

// splitmix64 step: full-avalanche 64-bit mixer (Vigna / Steele et al.).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Per-run seed: avalanche-mix of (master_seed, run_index). A pure function of
// its inputs, so worker count and scheduling order cannot change results.
inline std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
    std::uint64_t s = master_seed;
    (void)splitmix64(s);          // decorrelate from the raw master seed
    s ^= 0xd1b54a32d192ed03ULL * (run_index + 1);
    return splitmix64(s);
}

// xoshiro256** (Blackman & Vigna, public domain reference algorithm).
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, bound), bound >= 1. Rejection sampling, no modulo bias.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool coin() { return (next_u64() >> 63) != 0; }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

} // namespace evobench

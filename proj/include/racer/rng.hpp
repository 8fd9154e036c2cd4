#pragma once

#include <cmath>
#include <cstdint>

namespace racer {

// PCG32 with independent streams. All randomness in the project flows
// through this generator so that seeded runs reproduce bit-for-bit across
// platforms and standard-library versions.
class Pcg32 {
public:
    Pcg32() : Pcg32(0x853c49e6748fea9bULL) {}

    explicit Pcg32(uint64_t seed, uint64_t stream = 0) {
        state_ = 0;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    uint32_t next_u32() {
        uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // uniform in [0, 1)
    double uniform01() { return next_u32() * (1.0 / 4294967296.0); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [0, n), n >= 1
    uint32_t below(uint32_t n) { return static_cast<uint32_t>(uniform01() * n); }

    // standard normal, Box-Muller; consumes two draws per call
    double normal() {
        double u1 = (next_u32() + 1.0) * (1.0 / 4294967296.0);  // (0, 1]
        double u2 = next_u32() * (1.0 / 4294967296.0);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

private:
    static constexpr double kTwoPi = 6.283185307179586476;
    uint64_t state_ = 0;
    uint64_t inc_ = 1;
};

// splitmix64 finalizer; derives per-episode / per-trial seeds from a base seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace racer

#pragma once

#include <cmath>
#include <cstdint>

namespace abridge::rng {

/// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman & Vigna). State seeded externally.
class Xoshiro256pp {
public:
    Xoshiro256pp(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3)
        : s_{s0, s1, s2, s3} {}

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in (-1, 1].
    double uniform_sym() { return 1.0 - 2.0 * uniform(); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Counter-based substream derivation: the stream for (seed, index) depends only
/// on those two values, never on call order, so replica i's draws are identical
/// no matter which worker runs it.
inline Xoshiro256pp substream(std::uint64_t seed, std::uint64_t index, std::uint64_t domain = 0) {
    std::uint64_t z = mix64(seed) ^ mix64(mix64(domain) + index);
    const std::uint64_t s0 = mix64(z);
    const std::uint64_t s1 = mix64(z ^ 0xA5A5A5A5A5A5A5A5ull);
    const std::uint64_t s2 = mix64(z + 0x0123456789ABCDEFull);
    const std::uint64_t s3 = mix64(z ^ 0x5DEECE66Dull);
    return Xoshiro256pp(s0, s1, s2, s3);
}

struct NormalPair {
    double z1, z2;
};

/// Marsaglia polar method; consumes a variable but stream-determined number of uniforms.
inline NormalPair normal_pair(Xoshiro256pp& g) {
    for (;;) {
        const double v1 = g.uniform_sym();
        const double v2 = g.uniform_sym();
        const double s = v1 * v1 + v2 * v2;
        if (s > 0.0 && s < 1.0) {
            const double c = std::sqrt(-2.0 * std::log(s) / s);
            return {v1 * c, v2 * c};
        }
    }
}

}  // namespace abridge::rng

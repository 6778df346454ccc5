#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace curvegas {

// 64-bit finalizer (splitmix64). Bijective, so distinct inputs never collide.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Fold a word into a running key. Order-sensitive, so (a,b) and (b,a) differ.
inline constexpr std::uint64_t absorb(std::uint64_t key, std::uint64_t word) noexcept {
    return mix64(key ^ (word + 0x9E3779B97F4A7C15ull + (key << 6) + (key >> 2)));
}

inline double u64_to_open01(std::uint64_t x) noexcept {
    // (0,1): top 52 bits, centered on the grid (2k+1)/2^53. Every value is
    // exactly representable, so no rounding can reach 0 or 1 (a 53-bit
    // variant ties to exactly 1.0 at the top of the range).
    return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

// Identifies one scalar noise draw of the stochastic integrator. Keying the
// draw by its coordinates (rather than by generator state) makes every draw
// reproducible in isolation: shifted or restarted replays see the same noise.
struct NoiseKey {
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
    std::uint64_t attempt = 0;   // retry counter within one step
    std::uint64_t particle = 0;
};

inline std::uint64_t key_u64(const NoiseKey& k, std::uint64_t lane) noexcept {
    std::uint64_t h = mix64(k.seed);
    h = absorb(h, k.step);
    h = absorb(h, k.attempt);
    h = absorb(h, k.particle);
    return mix64(h ^ (0xD1B54A32D192ED03ull * (lane + 1)));
}

// One standard normal per key (Box-Muller on two hashed uniforms).
inline double standard_normal(const NoiseKey& k) noexcept {
    const double u1 = u64_to_open01(key_u64(k, 0));
    const double u2 = u64_to_open01(key_u64(k, 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Sequential stream with the same mixing core, for samplers and init jitter.
// `stream` separates independent consumers (chains, replicas) of one seed.
class StreamRng {
public:
    explicit StreamRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(absorb(mix64(seed), stream)) {}

    std::uint64_t next_u64() noexcept { return mix64(key_ ^ (0x9E3779B97F4A7C15ull * ++ctr_)); }

    double uniform01() noexcept { return u64_to_open01(next_u64()); }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    double normal() noexcept {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform index in [0, n) by rejection (exact, no modulo bias).
    std::size_t uniform_index(std::size_t n) noexcept {
        const std::uint64_t bound = ~0ull - ~0ull % n;
        std::uint64_t x = next_u64();
        while (x >= bound) x = next_u64();
        return static_cast<std::size_t>(x % n);
    }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

} // namespace curvegas

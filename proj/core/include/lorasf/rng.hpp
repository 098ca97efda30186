#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace lorasf {

/// splitmix64 step; used both as a standalone mixer and to seed the
/// main generator.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent child seed from a base seed and a path of stream
/// ids (e.g. {purpose, tree index, node index}). The result depends on every
/// id and its position, so disjoint paths give unrelated streams. This keeps
/// parallel construction order-independent: each unit of work seeds its own
/// generator from the same (base, path) key regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = base;
    splitmix64(s);
    for (std::uint64_t id : path) {
        s ^= 0x9E3779B97F4A7C15ULL + id;
        splitmix64(s);
    }
    std::uint64_t t = s;
    return splitmix64(t);
}

/// xoshiro256++ with a fixed, portable draw pipeline. std:: distributions are
/// implementation-defined, so all uniform/normal/index draws are implemented
/// here to make seeded results reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double next_double(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Uniform index in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t next_index(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Standard normal via the Marsaglia polar method (no trig functions,
    /// keeps the draw sequence simple and deterministic).
    double next_normal() {
        for (;;) {
            double u = 2.0 * next_double() - 1.0;
            double v = 2.0 * next_double() - 1.0;
            double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) {
                return u * std::sqrt(-2.0 * std::log(s) / s);
            }
        }
    }

    double next_normal(double mean, double stddev) {
        return mean + stddev * next_normal();
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace lorasf

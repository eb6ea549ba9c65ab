#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace smn {

// Deterministic xoshiro256** generator with splitmix64 seeding.  Hand-rolled
// draw functions keep simulation traces reproducible independent of the
// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& word : state_) {
            z += 0x9E3779B97F4A7C15ULL;
            std::uint64_t x = z;
            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
            x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
            word = x ^ (x >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer in [0, n); n must be > 0.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t threshold = (-n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Exponential with the given rate (per unit).
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    // One Box-Muller pair of independent standard normals.
    std::pair<double, double> normal_pair() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log1p(-u1));
        const double angle = 6.283185307179586 * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

// Stable stream-domain tags; every simulation consumer derives its stream
// from (master seed, domain, index) so that behavior is independent of
// meter count and scheduling order.
enum class StreamDomain : std::uint64_t {
    Topology = 1,
    MeterMac = 2,
    Traffic = 3,
    QdcfGate = 4,
    ZcNoise = 5,
};

struct RandomStreams {
    std::uint64_t master_seed = 0;

    Rng derive(StreamDomain domain, std::uint64_t index = 0) const {
        auto mix = [](std::uint64_t x) {
            x += 0x9E3779B97F4A7C15ULL;
            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
            x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
            return x ^ (x >> 31);
        };
        const std::uint64_t stage1 = mix(master_seed);
        const std::uint64_t stage2 = mix(stage1 + static_cast<std::uint64_t>(domain));
        return Rng(mix(stage2 + index));
    }
};

}  // namespace smn

// Deterministic random streams.
//
// All sampling uses explicit transforms (53-bit uniforms, Box-Muller normals,
// inverse-CDF exponentials) on top of std::mt19937_64, so a given seed yields
// the same draw sequence on every platform. std::*_distribution is avoided on
// purpose: the standard does not pin its algorithms.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace d2dec {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stable substream seed for (master, stream_id). Monte Carlo paths and sweep
// rows each take a substream, so results do not depend on execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream_id + 0x51ed2701ULL));
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double next_uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard normal via plain Box-Muller; consumes exactly two uniforms.
    double next_normal() {
        const double u1 = 1.0 - next_uniform(); // (0, 1], keeps log() finite
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Exponential with the given mean via inverse CDF: -mean*log(1-u).
    double next_exponential(double mean) { return -mean * std::log1p(-next_uniform()); }

private:
    std::mt19937_64 gen_;
};

} // namespace d2dec

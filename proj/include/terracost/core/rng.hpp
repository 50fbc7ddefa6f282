#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace terracost {

/// SplitMix64 generator. Every random decision in the project flows from one
/// of these, seeded directly or through derive_seed, so datasets and training
/// runs are bit-reproducible across platforms (no std::*_distribution).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 bits of mantissa.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo; bias is negligible for n << 2^64 and the
        // same on every platform, which is what matters here.
        return next() % n;
    }

    /// Standard normal via Box-Muller on the raw stream.
    double gaussian() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// Derives an independent stream seed from a base seed and salts by running
/// each value through the SplitMix64 mix function.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt_a, std::uint64_t salt_b = 0) {
    SplitMix64 rng(seed);
    std::uint64_t s = rng.next() ^ (salt_a * 0x9e3779b97f4a7c15ULL);
    SplitMix64 rng2(s);
    return rng2.next() ^ (salt_b * 0xd1b54a32d192ed03ULL);
}

}  // namespace terracost

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace roomnet {

// Fully-specified scrambler so every artifact is reproducible from a single
// u64 seed regardless of platform or standard library.
inline uint64_t splitmix64_scramble(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
    return splitmix64_scramble(a + 0x9E3779B97F4A7C15ULL * (b + 1));
}

class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64_scramble(state_);
    }

    // in [0, 1)
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller; u1 shifted into (0, 1] so the log is finite.
    double gaussian() {
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::vector<double> unit_vector(std::size_t dim) {
        std::vector<double> v(dim);
        double norm_sq = 0.0;
        do {
            norm_sq = 0.0;
            for (auto& x : v) {
                x = gaussian();
                norm_sq += x * x;
            }
        } while (norm_sq < 1e-24);
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& x : v) x *= inv;
        return v;
    }

    // Fisher-Yates over [0, n)
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next() % i);
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

  private:
    uint64_t state_;
};

}  // namespace roomnet

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "bhi/error.hpp"

namespace bhi {

/// Deterministic random stream: splitmix64 state expansion feeding a
/// xoshiro256++ core. The algorithm is pinned here (not delegated to
/// <random> distributions, whose output is implementation-defined) so a
/// seed reproduces the identical stream on every platform.
///
/// Instances are single-owner; concurrent users derive independent streams
/// with derive_seed(seed, stream, index).
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
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

    /// Uniform in [0, 1) with 53 mantissa bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in [0, bound) by rejection of the biased tail.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw Error("rng", "below(0) is undefined");
        for (;;) {
            const std::uint64_t x = next_u64();
            const std::uint64_t r = x % bound;
            if (x - r <= ~std::uint64_t{0} - (bound - 1)) return r;
        }
    }

    /// Standard normal draw via the Marsaglia polar method.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * f;
        has_cached_ = true;
        return u * f;
    }

    /// k distinct indices drawn uniformly from {0, ..., n-1}, returned in
    /// ascending order (partial Fisher-Yates).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n) throw Error("rng", "sample larger than population");
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(pool[i], pool[j]);
        }
        std::vector<std::size_t> picked(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(picked.begin(), picked.end());
        return picked;
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Documented seed-splitting rule for parallel or per-iteration streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t x = base ^ (stream * 0x9e3779b97f4a7c15ULL) ^ (index + 0x632be59bd9b4e019ULL);
    // One splitmix64 round decorrelates adjacent (stream, index) pairs.
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace bhi

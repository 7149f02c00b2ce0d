#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qkdsec {

/// Counter-based SplitMix64 stream.
///
/// Output number `i` of stream `(seed, stream_id)` is
/// `mix64(seed + golden * (stream_id * 2^32 + i + 1))`, so every draw is a pure
/// function of the seed and its position and results are identical on every
/// platform.
class CounterRng {
   public:
    explicit CounterRng(uint64_t seed, uint64_t stream_id = 0) : seed_(seed), counter_(stream_id << 32) {}

    static constexpr uint64_t mix64(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t next_u64() {
        ++counter_;
        return mix64(seed_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    /// Standard normal via Box-Muller (one value per call, no caching).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    uint64_t position() const { return counter_; }

   private:
    uint64_t seed_;
    uint64_t counter_;
};

}  // namespace qkdsec

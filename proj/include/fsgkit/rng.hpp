#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace fsgkit {

/// Seedable generator with a platform-independent output sequence.
///
/// Streams are derived from a list of keys (e.g. run seed, round, outer
/// iteration) through SplitMix64, so two streams with different keys are
/// statistically independent and identical across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(mix(seed ^ 0x9E3779B97F4A7C15ULL)) {}

    Rng(std::initializer_list<std::uint64_t> keys) noexcept : state_(0x243F6A8885A308D3ULL) {
        for (auto k : keys) state_ = mix(state_ ^ mix(k + 0x9E3779B97F4A7C15ULL));
    }

    std::uint64_t next_u64() noexcept {
        // xorshift64* over a SplitMix-initialised state
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1DULL;
    }

    /// Uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    double normal() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z = z ^ (z >> 31);
        return z == 0 ? 0x1234567ULL : z;
    }

    std::uint64_t state_;
};

}  // namespace fsgkit

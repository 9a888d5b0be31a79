#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace mecchain {

/// Counter-based SplitMix64: draw i is mix(seed + (i+1)·γ), so a stream is
/// fully determined by (seed, counter) on every platform.
class SplitMix64 {
public:
    static constexpr const char* kAlgorithm = "splitmix64";

    explicit SplitMix64(std::uint64_t seed = 0) : seed_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, n), rejection sampling without modulo bias.
    std::uint64_t uniform(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform: empty range");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t r;
        do {
            r = next();
        } while (r >= limit);
        return r % n;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace mecchain

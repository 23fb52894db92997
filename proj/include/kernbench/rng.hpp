#pragma once

#include <cstdint>

namespace kernbench {

/// Counter-based generator: draw i of a stream is a pure function of (seed, i),
/// so ranges of draws can be handed to independent workers deterministically.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed = 0, std::uint64_t counter = 0)
        : seed_(seed), counter_(counter) {}

    std::uint64_t next_u64() { return mix(seed_, counter_++); }

    /// Uniform in the open interval (0, 1).
    double next_open01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Returns a generator for the next `draws` values and skips past them.
    CounterRng split(std::uint64_t draws) {
        CounterRng sub(seed_, counter_);
        counter_ += draws;
        return sub;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
        // splitmix64 finalizer over a Weyl sequence
        std::uint64_t z = seed * 0xD1342543DE82EF95ULL + (counter + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace kernbench

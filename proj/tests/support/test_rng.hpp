#pragma once

#include <cstdint>

namespace testsupport {

// splitmix64; self-contained so tests never depend on library RNG state
struct TestRng {
    std::uint64_t state;

    explicit TestRng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int range(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(uniform() * (hi - lo + 1)) % (hi - lo + 1);
    }

    // Box-Muller
    double gaussian(double mean, double sigma);
};

} // namespace testsupport

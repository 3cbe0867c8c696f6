#pragma once

#include <cstdint>

namespace walloid {

// splitmix64. Deterministic across platforms; all randomized tests and CLI
// generators take an explicit 64-bit seed.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n).
    uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }

    bool chance(double p) {
        return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0) < p;
    }

private:
    uint64_t state_;
};

inline constexpr uint64_t kDefaultSeed = 0x5eed0a11011dULL;

}  // namespace walloid

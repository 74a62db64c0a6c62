#pragma once

#include <cmath>
#include <cstdint>

namespace nsstab {

/// Counter-based deterministic random stream: every draw is a pure function of
/// (seed, counter words), so identical specs give identical fields no matter
/// what order or thread evaluates them. Mixing is splitmix64.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t word(std::uint64_t c0, std::uint64_t c1 = 0, std::uint64_t c2 = 0) const {
        std::uint64_t h = mix(seed_ ^ 0x243f6a8885a308d3ULL);
        h = mix(h ^ (c0 + 0x9e3779b97f4a7c15ULL));
        h = mix(h ^ (c1 + 0x85ebca6b2b2ae35ULL));
        h = mix(h ^ (c2 + 0xc2b2ae3d27d4eb4fULL));
        return h;
    }

    /// Uniform in [0, 1).
    double uniform(std::uint64_t c0, std::uint64_t c1 = 0, std::uint64_t c2 = 0) const {
        return static_cast<double>(word(c0, c1, c2) >> 11) * 0x1.0p-53;
    }

    /// Uniform in [-1, 1).
    double symmetric(std::uint64_t c0, std::uint64_t c1 = 0, std::uint64_t c2 = 0) const {
        return 2.0 * uniform(c0, c1, c2) - 1.0;
    }

    /// Standard normal (Box-Muller on two counter lanes).
    double normal(std::uint64_t c0, std::uint64_t c1 = 0, std::uint64_t c2 = 0) const {
        const double u1 = uniform(c0, c1, 2 * c2);
        const double u2 = uniform(c0, c1, 2 * c2 + 1);
        const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        return r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
};

}  // namespace nsstab

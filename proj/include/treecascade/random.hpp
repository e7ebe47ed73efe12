#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace treecascade {

/// Seeded generator with a fixed algorithm (std::mt19937_64) and hand-written
/// transforms, so a seed produces the same stream on every platform. The
/// standard <random> distributions are implementation-defined and are not used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1); never returns 0.
    double uniform_open01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n), unbiased by rejection.
    std::size_t uniform_index(std::size_t n);

    /// Standard normal by Box-Muller; the second value of each pair is cached.
    double normal();

    /// +1 or -1 with equal probability.
    double sign() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

    /// Exponential with unit mean.
    double exponential();

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace treecascade

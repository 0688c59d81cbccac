#pragma once

#include <cstdint>
#include <random>

namespace bindcert {

/// Seeded generator with platform-independent draws (std distributions are
/// implementation-defined, the raw mt19937_64 stream is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1) from the top 53 bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    /// Uniform in (0, hi].
    double positive(double hi) { return hi * (1.0 - unit()); }
    /// Uniform integer in [lo, hi].
    int pick(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer; derives independent sub-seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace bindcert

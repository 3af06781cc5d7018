#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace imphedge {

/**
 * Counter-based normal generator.
 *
 * Stateless: the k-th Brownian increment of path p is a pure function of
 * (seed, p, k), so simulations are reproducible independently of thread
 * scheduling or path evaluation order. Mixing is three rounds of the
 * splitmix64 finalizer over the (seed, path, counter) words; normals come
 * from Box–Muller on the two mixed words.
 */
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Standard normal draw for (path, step).
    double normal(std::uint64_t path, std::uint64_t step) const {
        const std::uint64_t a = mix(seed_ ^ mix(path + 0x9e3779b97f4a7c15ULL));
        const std::uint64_t b = mix(a ^ mix(step + 0xbf58476d1ce4e5b9ULL));
        const std::uint64_t c = mix(b + path * 0x94d049bb133111ebULL + step);
        const double u1 = to_unit_open(b ^ (c << 1));
        const double u2 = to_unit_open(c);
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform in (0,1) for (path, step, tag); tag separates independent streams.
    double uniform(std::uint64_t path, std::uint64_t step, std::uint64_t tag = 0) const {
        const std::uint64_t a = mix(seed_ ^ mix(path ^ (tag << 32)));
        return to_unit_open(mix(a + step));
    }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    // 53-bit mantissa, shifted into (0,1) so log() is always finite
    static double to_unit_open(std::uint64_t x) {
        return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t seed_;
};

} // namespace imphedge

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qkdsim {

/// One round of the splitmix64 mixer.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Pure derivation of a stream seed from (master seed, grid index, trial
/// index). Every parallel worker seeds its own stream through this function,
/// so results do not depend on scheduling or on the parallelism degree.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::uint64_t grid_index,
                                 std::uint64_t trial_index = 0) {
    std::uint64_t x = master;
    x ^= splitmix64(grid_index + 0x9E3779B97F4A7C15ULL);
    x = splitmix64(x);
    x ^= splitmix64(trial_index + 0xD1B54A32D192ED03ULL);
    return splitmix64(x);
}

/// Deterministic random stream. All stochastic operations in the library
/// take one of these explicitly; a fixed seed reproduces a run bit for bit.
/// Distribution transforms are implemented here (not via <random>
/// distribution adaptors) so the draw sequence is fixed by this header alone.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Fair coin as a bit value.
    int coin() { return uniform() < 0.5 ? 0 : 1; }

    /// Normal deviate via Box-Muller (two uniforms per draw, no caching).
    double normal(double mean, double stddev) {
        const double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace qkdsim

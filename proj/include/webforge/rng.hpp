#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "webforge/hash.hpp"

namespace webforge {

// Deterministic RNG wrapper. mt19937_64 output is specified by the standard,
// and every derived draw below is built from raw engine words only, so a seed
// produces the same stream on every platform. (std::uniform_real_distribution
// and std::normal_distribution are implementation-defined; avoid them.)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_word() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n);
    }

    // Standard normal via Box-Muller; consumes two uniforms per pair.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stable sub-seed derivation for per-item streams (path, step index, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index = 0) {
    std::uint64_t h = fnv1a64(tag, base ^ 0x9e3779b97f4a7c15ull);
    h ^= index + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

} // namespace webforge

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace bsskit {

/// The single generator family used everywhere: mt19937_64 with hand-written
/// transforms, so streams are bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Substream `index` of `seed` (seed offsetting with a golden-ratio stride).
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() {
        double u;
        do {
            u = uniform01();
        } while (u == 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double phi = 2.0 * std::numbers::pi * uniform01();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    double sign() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace bsskit

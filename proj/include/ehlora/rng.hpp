#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ehlora {

// Seeded 64-bit Mersenne Twister with explicit, portable conversions to
// doubles. Independent streams are derived from (seed, stream id) so that
// per-device randomness does not depend on evaluation order.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          0x5eedu};
        engine_.seed(seq);
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1), safe to pass to log().
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    // Unit-mean exponential, used for Rayleigh power gains |h|^2.
    double exponential() { return -std::log(uniform_open()); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace ehlora

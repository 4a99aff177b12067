#ifndef PROTOCLASS_RANDOM_HPP
#define PROTOCLASS_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace protoclass {

/**
 * @brief SplitMix64 generator (Steele, Lea and Flood, 2014).
 *
 * Every seeded draw in the engine goes through this generator so results
 * are identical across platforms and standard libraries. The state update
 * adds 0x9E3779B97F4A7C15 and the output mix is
 *
 *     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
 *     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
 *     z =  z ^ (z >> 31)
 *
 * Derived draws:
 *  - uniform01: top 53 bits scaled by 2^-53, in [0, 1).
 *  - below(n): rejection of raw values under (2^64 - n) mod n, then value mod n.
 *  - gaussian: Box-Muller on (1 - uniform01, uniform01), cosine branch only,
 *    one normal per two uniforms (no caching, so the stream is stateless
 *    beyond the 64-bit counter).
 */
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) {
                return r % n;
            }
        }
    }

    double gaussian() {
        const double u1 = 1.0 - uniform01(); // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace protoclass

#endif

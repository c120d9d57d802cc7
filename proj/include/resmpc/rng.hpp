#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace resmpc {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace detail

/// Derives an independent substream seed from (root seed, purpose tag, index).
/// All randomness in the project flows from one 64-bit seed through this
/// function, which is what makes parallel sampling order-independent: each
/// unit of work owns a substream keyed by its identity, not by schedule.
inline constexpr std::uint64_t derive_seed(std::uint64_t root,
                                           std::string_view tag,
                                           std::uint64_t index) {
    std::uint64_t x = detail::splitmix64(root ^ detail::fnv1a64(tag));
    return detail::splitmix64(x + 0x9E3779B97F4A7C15ULL * (index + 1));
}

/// xoshiro-free minimal generator: splitmix64 stream. Distribution code is
/// hand-rolled so draws are bit-stable across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /// Uniform in (0, 1]; never returns 0 so logs are safe.
    double uniform() {
        return double((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * double(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (two uniforms per draw, stateless).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Laplace(0, scale) by inversion.
    double laplace(double scale) {
        const double u = uniform() - 0.5;  // (-0.5, 0.5]
        const double a = u < 0 ? -1.0 : 1.0;
        return -scale * a * std::log(1.0 - 2.0 * std::abs(u));
    }

private:
    std::uint64_t state_;
};

}  // namespace resmpc

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace evimem {

// Stateless counter-based draws. Every random quantity in the simulator is a
// pure function of (key, counter...) so results do not depend on call order
// or on the standard library's distribution implementations.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

template <typename... Rest>
[[nodiscard]] constexpr std::uint64_t hash_key(std::uint64_t first, Rest... rest) noexcept {
    std::uint64_t h = mix64(first);
    ((h = mix64(h ^ static_cast<std::uint64_t>(rest))), ...);
    return h;
}

// Uniform in [0, 1).
[[nodiscard]] constexpr double unit_uniform(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Two independent standard normals via Box-Muller on two derived uniforms.
[[nodiscard]] inline std::pair<double, double> normal_pair(std::uint64_t key) noexcept {
    const double u1 = 1.0 - unit_uniform(mix64(key ^ 0xA5A5A5A5A5A5A5A5ULL));  // (0, 1]
    const double u2 = unit_uniform(mix64(key ^ 0x5A5A5A5A5A5A5A5AULL));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

[[nodiscard]] inline double standard_normal(std::uint64_t key) noexcept { return normal_pair(key).first; }

// Uniform integer in [0, n); n > 0.
[[nodiscard]] constexpr std::uint64_t uniform_below(std::uint64_t key, std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(unit_uniform(mix64(key)) * static_cast<double>(n));
}

}  // namespace evimem

#pragma once

#include <array>
#include <charconv>
#include <string>

namespace evimem {

// Shortest round-trip decimal form, locale independent ("." separator).
[[nodiscard]] inline std::string format_real(double value) {
    std::array<char, 64> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), result.ptr);
}

// Fixed-point with the given number of decimals, locale independent.
[[nodiscard]] inline std::string format_fixed(double value, int decimals) {
    std::array<char, 64> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
    return std::string(buf.data(), result.ptr);
}

}  // namespace evimem

#pragma once

#include <stdexcept>
#include <string>

namespace evimem {

// Raised for invalid configuration values or violated parameter ranges.
// The message always names the offending key or parameter.
class config_error : public std::invalid_argument {
public:
    config_error(const std::string& key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(key) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// Raised when a numerical routine produces a non-finite value.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace evimem

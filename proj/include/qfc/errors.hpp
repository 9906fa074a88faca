#pragma once

#include <stdexcept>
#include <string>

namespace qfc {

/// Raised when a physical parameter lies outside its admissible interval.
class RangeError : public std::out_of_range {
public:
    explicit RangeError(const std::string& what) : std::out_of_range(what) {}
};

/// Raised for an unusable optimizer or sweep configuration.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

namespace detail {

inline void require_range(double value, double lo, double hi, const char* name) {
    if (!(value >= lo && value <= hi)) {
        throw RangeError(std::string(name) + " = " + std::to_string(value) + " outside [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

}  // namespace detail
}  // namespace qfc

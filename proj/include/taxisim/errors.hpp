#pragma once

#include <stdexcept>
#include <string>

namespace taxisim {

/// Bad configuration or input validation failure (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A theorem-backed runtime invariant was breached and the halt policy fired
/// (CLI exit code 3).
struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace taxisim

#pragma once

#include <stdexcept>
#include <string>

namespace maxstab {

/// Invalid user-facing configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure such as a non-factorizable covariance or a singular
/// information matrix (CLI exit code 3).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace maxstab

#pragma once

#include <stdexcept>
#include <string>

namespace gcs {

/// Invalid parameters, malformed input, or violated preconditions.
/// The CLI maps these to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation that could not be completed numerically (step-size
/// underflow, domain escape, Newton divergence, ...). Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gcs

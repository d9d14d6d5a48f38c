#pragma once

#include <stdexcept>
#include <string>

namespace catsense {

/// Bad user-facing configuration (unknown family, malformed range, ...).
/// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (non-finite objective, degenerate working point, ...).
/// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A validation or regression check failed (e.g. Monte Carlo z-score out of
/// range). The CLI maps this to exit code 4.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace catsense

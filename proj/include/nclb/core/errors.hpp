#pragma once

#include <stdexcept>
#include <string>

namespace nclb {

/// A parameter violates a documented invariant. The message names the invariant.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A quadrature or extrapolation did not settle within its declared tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A monitored quantity left its admissible range during a run.
class MonitorError : public std::runtime_error {
 public:
  explicit MonitorError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool ok, const std::string& invariant) {
  if (!ok) throw ConfigError(invariant);
}

}  // namespace nclb

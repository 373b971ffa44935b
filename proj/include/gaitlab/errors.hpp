#pragma once

#include <stdexcept>
#include <string>

namespace gaitlab {

// Bad usage, unreadable or invalid configuration and data files.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Sockets, ports, filesystem and similar environment failures.
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Diverged or invalid numerics (NaN losses, rank deficiency, ...).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gaitlab

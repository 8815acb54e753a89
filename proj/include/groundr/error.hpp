#pragma once

#include <stdexcept>
#include <string>

namespace groundr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed catalog, layout or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A request that is well-formed but cannot be satisfied (no feasible layout,
/// uncoverable capability, executability precondition violated).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace groundr

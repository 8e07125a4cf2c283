#pragma once

#include <stdexcept>
#include <string>

namespace bethe_csma {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rate vector lies outside the Bethe domain, or an input would hit a
/// logarithm singularity. The message names the offending link or edge.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration was requested beyond the configured vertex cap.
class IntractableError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied argument violates an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency check failed (e.g. an iterate escaped the domain).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace bethe_csma

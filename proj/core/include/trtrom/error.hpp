#pragma once

#include <stdexcept>
#include <string>

namespace trtrom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (T <= 0, hnu <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Index or vector length inconsistent with the phase-space layout.
class LayoutError : public Error {
 public:
  using Error::Error;
};

/// Solver breakdown: singular systems, non-convergence, non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Corrupt, truncated or mismatched persisted file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid or missing configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace trtrom

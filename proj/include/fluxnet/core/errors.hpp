#pragma once

#include <stdexcept>
#include <string>

namespace fluxnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state vector is not admissible for the PDE (e.g. negative depth).
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// An operation that needs a wet state received h <= 0.
class DryStateError : public InvalidStateError {
 public:
  using InvalidStateError::InvalidStateError;
};

/// An iterative solver did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Sizes of vectors, matrices or network layers do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A file could not be parsed.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or argument value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch) : Error(what), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace fluxnet

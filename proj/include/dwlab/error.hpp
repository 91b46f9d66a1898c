#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dwlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violation: bad shapes, non-finite data, out-of-range parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::size_t iterations)
      : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

/// Argument outside the domain of a formula (e.g. |z| >= 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Ground state too close to degenerate for the requested quantity.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class ClassificationError : public Error {
 public:
  using Error::Error;
};

class InvalidDensityMatrix : public Error {
 public:
  using Error::Error;
};

}  // namespace dwlab

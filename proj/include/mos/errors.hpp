#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mos {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract argument (bad grid, bad coefficients, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Point outside the interval, negative t, or similar domain violation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A finite value was required but an extended (+inf) value appeared.
class ExtendedValueError : public Error {
 public:
  using Error::Error;
};

/// Generalized inverse asked for a level the function never reaches.
class UnreachableLevelError : public Error {
 public:
  using Error::Error;
};

/// Norm requested for a function whose modular is +inf at every scale.
class NotInSpaceError : public Error {
 public:
  using Error::Error;
};

/// Quadrature failed to converge; carries the partial estimate.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double partial)
      : Error(what), partial_(partial) {}
  double partial() const { return partial_; }

 private:
  double partial_;
};

/// Witness construction exhausted its search budget.
class ConstructionFailedError : public Error {
 public:
  using Error::Error;
};

/// Weak derivative requested for a discontinuous piecewise function.
class NotWeaklyDifferentiableError : public Error {
 public:
  using Error::Error;
};

/// Text input (expression, space file, function file) failed to parse.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace mos

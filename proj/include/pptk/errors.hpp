#pragma once

#include <stdexcept>
#include <string>

namespace pptk {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix/shape/permutation mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Composite dimension above the configured cap.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Eigen/SVD solver failure or a non-finite result.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed state-spec document.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace pptk

#pragma once

#include <stdexcept>
#include <string>

namespace qgf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on incompatible registers or an index is out of range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a meaningful result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A state or excitation has (numerically) vanishing norm.
class DegenerateStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Every metric eigenvalue fell below the truncation threshold.
class EmptySolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qgf

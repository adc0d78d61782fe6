#pragma once

#include <stdexcept>
#include <string>

namespace lqfleet {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures (CLI exit code 2).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotPSD : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyInput : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularKKT : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateConstraint : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFiniteRecursion : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFiniteState : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IndexOutOfRange : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Input / configuration failures (CLI exit code 1).
class InputError : public Error {
 public:
  using Error::Error;
};

class InvalidWindow : public InputError {
 public:
  using InputError::InputError;
};

class ConfigParseError : public InputError {
 public:
  using InputError::InputError;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace lqfleet

#pragma once

#include <stdexcept>
#include <string>

namespace tmr {

// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad inputs: shapes, counts, files, labels. The CLI maps these to exit 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TooFewPoints : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TooFewLabeled : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ClassTooSmall : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& path, long row, long col, const std::string& what)
      : ValidationError(path + ":" + std::to_string(row) + ":" + std::to_string(col) +
                        ": " + what) {}
};

class LabelError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Numerical failures. The CLI maps these to exit 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace tmr

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace discpar {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or hyperparameter combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a data-model invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed corpus file; carries the 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Malformed embedding or model file.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss or gradient during optimization.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Analytic and numeric gradients disagree, or an oracle check failed.
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace discpar

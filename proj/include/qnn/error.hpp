#pragma once

#include <stdexcept>
#include <string>

namespace qnn {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested size is out of range (qubit count, basis size, ...).
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Bad gate targets: wrong arity, repeated or out-of-range qubit index.
class TargetError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input that makes a statistic undefined (e.g. both series constant).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Regression with no residual degrees of freedom left.
class SaturatedModelError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents. Carries the 1-based data row and column name when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::string column = {})
      : Error(what), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

/// A file could not be read.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qnn

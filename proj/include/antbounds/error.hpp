#pragma once

#include <stdexcept>
#include <string>

namespace antbounds {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input data that fails validation (bad CSV, too-small groups, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed tabular input. Carries the 1-based line number and field name.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : DataError("line " + std::to_string(line) + ", field '" + field +
                  "': " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// A numerical routine failed to converge or to bracket a root.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NoRootError : public NumericalError {
 public:
  NoRootError() : NumericalError("no root in bracket") {}
  using NumericalError::NumericalError;
};

}  // namespace antbounds

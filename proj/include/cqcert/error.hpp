#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cqcert {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Malformed problem file; carries a 1-based line/column.
class FormatError : public Error {
 public:
  FormatError(const std::string& message, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Evaluation outside an operation's domain (log of a nonpositive value, x/0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure inside a solver (iteration limit, breakdown).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace cqcert

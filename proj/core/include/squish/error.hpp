#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace squish {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (CSV rows, schema or structure files).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Inconsistent schema, flags or model configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Archive bytes that cannot be decoded. `decoded_rows` counts the tuples
/// recovered before the failure.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::size_t decoded_rows = 0)
      : Error(what), decoded_rows_(decoded_rows) {}

  std::size_t decoded_rows() const noexcept { return decoded_rows_; }

 private:
  std::size_t decoded_rows_;
};

/// File system failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace squish

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace measure_pca {

/// Base class for all errors raised by the library that are not plain
/// precondition violations (those use std::invalid_argument).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or unknown configuration. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or malformed input data. The CLI maps this to exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed point-cloud file; carries the 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A numerical routine failed to reach its stated accuracy.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace measure_pca

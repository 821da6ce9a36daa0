#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rcrank {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid hyperparameter or argument combination, detected before any work.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed textual input (LibSVM rows, model files, score lists).
class ParseError : public Error {
 public:
  enum class Kind { kMalformed, kRange, kFormat };

  ParseError(Kind kind, std::size_t line, const std::string& message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        kind_(kind),
        line_(line) {}

  Kind kind() const noexcept { return kind_; }
  /// 1-based line number, 0 when unknown.
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

}  // namespace rcrank

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace marea {

/// Precondition violated by the caller (bad argument, empty sample set, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed text input. Carries the 1-based line number of the offending row.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input whose content breaks a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable, malformed or inconsistent scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A violation bound was requested for a result without a decay rate.
class UndefinedBoundError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace marea

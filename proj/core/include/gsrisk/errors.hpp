#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsrisk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// State and model disagree on the number of stations or uncertain components.
class ModelMismatchError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the support of a distribution (e.g. k > N in a pmf).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A precondition of an operation was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Model or configuration values break an invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The exact oracle would have to enumerate more states than allowed.
class CapacityLimitError : public Error {
 public:
  using Error::Error;
};

/// Adaptive level selection could not reach the target within its budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration text. Carries the offending line and field.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& message)
      : Error("line " + std::to_string(line) + (field.empty() ? "" : ", field '" + field + "'") +
              ": " + message),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace gsrisk

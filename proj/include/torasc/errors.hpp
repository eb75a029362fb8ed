#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace torasc {

// Base of every error the library throws. The CLI maps the concrete kind
// onto an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument in the mathematical sense (negative exponent, empty
// polyhedron, non-finite evaluation point, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed user input (expression text, JSON, fixture names).
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : InputError(what + " at line " + std::to_string(line) + ", column " +
                   std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// A theorem hypothesis could not be certified, so the requested quantity is
// refused rather than computed.
class RefusalError : public Error {
 public:
  using Error::Error;
};

// A numeric budget (boxes, evaluations) ran out before the tolerance was met.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, double achieved_error)
      : Error(what), achieved_error_(achieved_error) {}

  double achieved_error() const { return achieved_error_; }

 private:
  double achieved_error_;
};

// An invariant that upstream code guarantees was violated. Signals a bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace torasc

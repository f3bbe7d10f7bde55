#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ontopt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An expression was evaluated outside its domain (log of a non-positive
/// argument, monomial at a non-positive coordinate, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The point or parameter map does not bind a symbol the expression uses.
class UnboundError : public Error {
 public:
  using Error::Error;
};

/// Analytic derivative requested at a kink (norm of a zero vector).
class NondifferentiableError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed problem file. JSON syntax errors carry a 1-based line/column;
/// schema errors (unknown keys, wrong types) name the JSON pointer instead and
/// report line 0.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  ParseError(const std::string& what, const std::string& pointer)
      : Error("schema error at " + (pointer.empty() ? std::string("/") : pointer) + ": " + what), pointer_(pointer) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& pointer() const { return pointer_; }

 private:
  std::size_t line_ = 0;
  std::size_t column_ = 0;
  std::string pointer_;
};

/// Semantically invalid problem (undeclared variable, bad cone tag, ...).
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> codes)
      : Error(what), codes_(std::move(codes)) {}

  const std::vector<std::string>& codes() const { return codes_; }

 private:
  std::vector<std::string> codes_;
};

/// A transform or solver was asked to work on a problem outside its pattern.
/// `kind` is one of NotReducible, NotGP, ShapeMismatch, NotApplicable,
/// NoInterior.
class InapplicableError : public Error {
 public:
  InapplicableError(std::string kind, const std::string& what)
      : Error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ontopt

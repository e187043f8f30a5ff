#pragma once

#include <stdexcept>
#include <string>

namespace vopt {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or matrix arity disagrees with the problem data.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Cone is not pointed, not full-dimensional, or otherwise unusable.
class DegenerateConeError : public Error {
 public:
  using Error::Error;
};

// Derivatives requested at a point where a nonsmooth primitive is active.
class NonsmoothError : public Error {
 public:
  using Error::Error;
};

// Expression evaluation produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Point lies outside the problem's domain box.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Candidate point violates the constraint system.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

// Supplied multipliers or parameters violate an operation's contract.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Direction handed to a second-order check is not critical.
class DirectionError : public Error {
 public:
  using Error::Error;
};

// Simplex pivot budget exhausted.
class IterationLimitError : public Error {
 public:
  using Error::Error;
};

// Syntax or semantic error in a problem file, with source position.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) +
              ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace vopt

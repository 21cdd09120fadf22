#pragma once

#include <stdexcept>
#include <string>

namespace ldbc {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument violates a documented range; field() names the offending input.
class ParameterError : public Error {
 public:
  ParameterError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Evaluation at (or numerically on top of) a primary.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Non-finite stage values, step caps, failed root finding.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Step size fell below h_min.
class StiffnessError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

// Two grids that must agree do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input that has no meaningful answer (constant field, zero radius).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ldbc

#pragma once

#include <stdexcept>
#include <string>

namespace beamspec {

// Root of every error raised by the library. Each subclass maps onto one
// failure category so the command-line front end can choose an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration document (missing key, wrong type).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A coefficient violates the positivity assumptions on the sampling grid.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

// Evaluation point outside the interval a profile lives on.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Caller violated a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The adaptive integrator could not make progress.
class StiffnessError : public Error {
 public:
  StiffnessError(const std::string& what, double x) : Error(what), x_(x) {}
  double where() const noexcept { return x_; }

 private:
  double x_;
};

// Root bracket whose end values share a sign.
class BracketError : public Error {
 public:
  using Error::Error;
};

// Mass matrix of the discrete oracle failed to factor.
class DefinitenessError : public Error {
 public:
  using Error::Error;
};

// A numerical observation contradicts a property the theory guarantees.
class TheoryViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace beamspec

#pragma once

#include <stdexcept>
#include <string>

namespace pqm {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different ambient dimensions.
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(int expected, int actual, const std::string& where)
      : Error(where + ": dimension mismatch (expected " + std::to_string(expected) +
              ", got " + std::to_string(actual) + ")"),
        expected_(expected),
        actual_(actual) {}

  int expected() const noexcept { return expected_; }
  int actual() const noexcept { return actual_; }

 private:
  int expected_;
  int actual_;
};

/// Argument outside the domain of a numerical function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A matrix failed the unitarity check.
class NotUnitary : public Error {
 public:
  NotUnitary(double deviation, const std::string& where)
      : Error(where + ": matrix is not unitary (max |U^H U - I| = " + std::to_string(deviation) + ")"),
        deviation_(deviation) {}

  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

/// A precondition that the caller must establish did not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A self-check inside the library failed. Indicates a bug or a numerical
/// breakdown, never bad user input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pqm

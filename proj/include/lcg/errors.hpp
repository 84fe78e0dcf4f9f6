#pragma once

#include <stdexcept>
#include <string>

namespace lcg {

// Precondition violated by caller-supplied data.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Evaluation requested outside the potential's parameter domain.
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

// Density vanishes where a logarithm is required.
class SingularDensityError : public InputError {
 public:
  using InputError::InputError;
};

// A denominator changes sign inside the requested range.
class RangeError : public InputError {
 public:
  RangeError(const std::string& what, double witness)
      : InputError(what), witness_(witness) {}
  double witness() const { return witness_; }

 private:
  double witness_;
};

}  // namespace lcg

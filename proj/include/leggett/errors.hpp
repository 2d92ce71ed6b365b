#pragma once

#include <stdexcept>
#include <string>

namespace leggett {

// Argument outside the documented range of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A matrix failed the Hermitian / unit-trace / PSD checks of a two-qubit state.
class InvalidStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Wrong number of correlation pairs for an inequality.
class ArityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// T u vanished while adapting Alice's settings to a correlation tensor.
class DegenerateTensorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Readout confusion matrix too ill-conditioned to invert.
class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, double condition_number)
      : std::runtime_error(what), condition_number_(condition_number) {}
  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

}  // namespace leggett

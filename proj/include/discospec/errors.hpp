#pragma once

#include <stdexcept>
#include <string>

namespace discospec {

/// Base of all library errors. The CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (x outside [0,1], non-finite lambda).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A precondition between arguments is violated (mismatched a1, bad sigma sum, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Not enough samples to form the requested statistic.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to deliver its guarantee.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class IncompleteSpectrum : public NumericalFailure {
 public:
  IncompleteSpectrum(const std::string& what, double gap_lo, double gap_hi)
      : NumericalFailure(what), gap_lo_(gap_lo), gap_hi_(gap_hi) {}
  double gap_lo() const { return gap_lo_; }
  double gap_hi() const { return gap_hi_; }

 private:
  double gap_lo_;
  double gap_hi_;
};

}  // namespace discospec

#pragma once

#include <stdexcept>
#include <string>

namespace pacrnn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, non-finite entries, empty input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Truncation window too narrow for rejection sampling to make progress.
class DegenerateTruncation : public Error {
 public:
  using Error::Error;
};

/// A linear iteration that should converge does not (spectral radius >= 1).
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// The system fails the sufficient condition for class-S membership.
/// `value()` is the offending contraction factor.
class NotClassS : public Error {
 public:
  NotClassS(const std::string& what, double value) : Error(what), value_(value) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Series composition with max(tau1, tau2) == 0, where ln(tau) is undefined.
class SingularComposition : public Error {
 public:
  using Error::Error;
};

/// Markov chain started at a point of zero target density.
class InvalidStart : public Error {
 public:
  using Error::Error;
};

/// Confidence level delta outside (0, 0.5].
class InvalidConfidence : public Error {
 public:
  using Error::Error;
};

/// An internal guarantee was broken; indicates a bug, not bad input.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace pacrnn

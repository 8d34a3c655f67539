#pragma once

#include <stdexcept>
#include <string>

namespace sn {

// Base of every error raised by the library. Each subclass names one failure
// mode so callers (and the CLI exit-code mapping) can dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// radial_ode
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, double radius)
      : Error(what), radius_(radius) {}
  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

// stationary
class BracketFailure : public Error { using Error::Error; };
class StateNotIsolated : public Error { using Error::Error; };
class DegenerateScaling : public Error { using Error::Error; };
class AsymptoteNotReached : public Error { using Error::Error; };
class InsufficientData : public Error { using Error::Error; };

class SpectrumError : public Error {
 public:
  SpectrumError(int index, const std::string& cause)
      : Error("state n=" + std::to_string(index) + ": " + cause), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

// chebyshev
class GridTooSmall : public Error { using Error::Error; };
class DomainMismatch : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };

// stability
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double condition_estimate)
      : Error(what), condition_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};
class IllConditioned : public Error { using Error::Error; };
class DegenerateMode : public Error { using Error::Error; };
class TrackingLost : public Error {
 public:
  TrackingLost(const std::string& what, double value) : Error(what), value_(value) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

// diagnostics
class NotABoundState : public Error { using Error::Error; };
class InvalidScales : public Error { using Error::Error; };

// io / cli
class IoError : public Error { using Error::Error; };
class StaleCache : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };

}  // namespace sn

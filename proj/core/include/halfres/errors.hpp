#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace halfres {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (x < 0, h <= 0, sigma = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Discretization too coarse for the requested frequency.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Spectral parameter lies outside the region where the continuation is defined.
class StripError : public Error {
 public:
  using Error::Error;
};

/// The adaptive integrator could not meet its tolerance.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

/// The matching determinant is too small for the Green's function to be trusted.
class NearResonanceError : public Error {
 public:
  NearResonanceError(const std::string& what, std::complex<double> lambda, double abs_w)
      : Error(what), lambda_(lambda), abs_w_(abs_w) {}
  std::complex<double> lambda() const { return lambda_; }
  double abs_wronskian() const { return abs_w_; }

 private:
  std::complex<double> lambda_;
  double abs_w_;
};

/// Another zero was found too close to the one being examined.
class IsolationError : public Error {
 public:
  using Error::Error;
};

/// A zero sits on (or too close to) the contour.
class BoundaryZeroError : public Error {
 public:
  using Error::Error;
};

/// Argument-principle integral did not settle near an integer.
class NonIntegerWindingError : public Error {
 public:
  NonIntegerWindingError(const std::string& what, double raw) : Error(what), raw_(raw) {}
  double raw() const { return raw_; }

 private:
  double raw_;
};

/// Contour integral did not converge under refinement.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Newton refinement left its basin. Carries the best bracketing rectangle found.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::complex<double> lo, std::complex<double> hi)
      : Error(what), lo_(lo), hi_(hi) {}
  std::complex<double> best_lo() const { return lo_; }
  std::complex<double> best_hi() const { return hi_; }

 private:
  std::complex<double> lo_, hi_;
};

/// Supplied zero list does not account for the winding number.
class CompletenessError : public Error {
 public:
  using Error::Error;
};

/// The eigenfunction is not small where the cutoff starts.
class BadCutoffError : public Error {
 public:
  using Error::Error;
};

/// Inputs fail the stated hypotheses of a check (reported apart from counterexamples).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string field = {}, int line = -1)
      : Error(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace halfres

#pragma once

#include <stdexcept>
#include <string>

namespace walklab {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: an invalid FiniteRV, a non-positive argument, a bad config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure could not produce a trustworthy value (lattice size
// cap, bracket failure, non-finite integrand, quadrature divergence).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Unbounded-below objective in a conjugate inversion.
class UnboundedError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Quadrature values keep growing as the rule is refined.
class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A discrete search ran out of candidates (e.g. the n-schedule of the
// growth certificate).
class SearchError : public Error {
 public:
  using Error::Error;
};

// No grid point shows a positive Laplace-transform margin over the Gaussian.
class NoMarginError : public SearchError {
 public:
  using SearchError::SearchError;
};

}  // namespace walklab

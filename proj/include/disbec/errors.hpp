#ifndef DISBEC_ERRORS_HPP
#define DISBEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace disbec {

// Base class for all failures raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Parameter outside its mathematical domain (negative density, NaN, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Grid too coarse for the requested operation.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Iterative solver failed to reach its tolerance within the step budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

// Root bracketing failed after the allowed number of expansions.
class BracketError : public Error {
 public:
  using Error::Error;
};

// Lookup outside the range a precomputed table covers.
class TableRangeError : public Error {
 public:
  using Error::Error;
};

// A table failed one of its structural invariants (ordering, bounds).
class TableError : public Error {
 public:
  using Error::Error;
};

// Two independent routes to the same quantity disagree beyond tolerance.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Configuration admits no nontrivial solution (e.g. no interval occupied).
class DegenerateConfigError : public Error {
 public:
  using Error::Error;
};

// Mismatched grid sizes or array lengths.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// File or serialization failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace disbec

#endif  // DISBEC_ERRORS_HPP

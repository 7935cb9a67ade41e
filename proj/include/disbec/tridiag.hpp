#ifndef DISBEC_TRIDIAG_HPP
#define DISBEC_TRIDIAG_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "disbec/errors.hpp"

namespace disbec {

// Solves a general tridiagonal system in place (Thomas algorithm).
// sub[i] couples row i to i-1 (sub[0] unused), sup[i] couples row i to i+1
// (sup[n-1] unused).  No pivoting: intended for diagonally dominant systems.
inline std::vector<double> tridiag_solve(const std::vector<double>& sub,
                                         const std::vector<double>& diag,
                                         const std::vector<double>& sup,
                                         std::vector<double> rhs) {
  const std::size_t n = diag.size();
  if (sub.size() != n || sup.size() != n || rhs.size() != n || n == 0) {
    throw DimensionError("tridiag_solve: inconsistent array sizes");
  }
  std::vector<double> c(n, 0.0);
  double beta = diag[0];
  if (beta == 0.0) throw DomainError("tridiag_solve: zero pivot");
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    c[i] = sup[i - 1] / beta;
    beta = diag[i] - sub[i] * c[i];
    if (beta == 0.0) throw DomainError("tridiag_solve: zero pivot");
    rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] -= c[i + 1] * rhs[i + 1];
  }
  return rhs;
}

// Number of eigenvalues of the symmetric tridiagonal matrix (diag, off)
// strictly below lambda, from the Sturm sign-change count of the LDL^T
// pivots.  off[i] couples i and i+1 (size n-1).
inline int sturm_count_below(const std::vector<double>& diag,
                             const std::vector<double>& off, double lambda) {
  const std::size_t n = diag.size();
  if (off.size() + 1 != n) throw DimensionError("sturm: off size must be n-1");
  int count = 0;
  double d = diag[0] - lambda;
  if (d < 0.0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    double b = off[i - 1];
    if (d == 0.0) d = 1e-300;
    d = (diag[i] - lambda) - b * b / d;
    if (d < 0.0) ++count;
  }
  return count;
}

// The k lowest eigenvalues (ascending) of the symmetric tridiagonal matrix
// by Sturm-count bisection inside the Gershgorin interval.
inline std::vector<double> tridiag_lowest_eigenvalues(
    const std::vector<double>& diag, const std::vector<double>& off, int k,
    double tol = 1e-10) {
  const std::size_t n = diag.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw DomainError("eigenvalue count out of range");
  }
  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::fabs(off[i - 1]);
    if (i + 1 < n) r += std::fabs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  std::vector<double> eigs(k);
  for (int j = 0; j < k; ++j) {
    double a = lo, b = hi;
    // Invariant: count(a) <= j < count(b).
    for (int iter = 0; iter < 200; ++iter) {
      double mid = 0.5 * (a + b);
      if (sturm_count_below(diag, off, mid) > j) {
        b = mid;
      } else {
        a = mid;
      }
      if (b - a <= tol * std::max(1.0, std::fabs(a) + std::fabs(b))) break;
    }
    eigs[j] = 0.5 * (a + b);
    lo = eigs[j];  // eigenvalues are sought in ascending order
  }
  return eigs;
}

// Eigenvector for an isolated eigenvalue estimate by inverse iteration.
// Returns the vector normalized to unit Euclidean norm.
inline std::vector<double> tridiag_eigenvector(const std::vector<double>& diag,
                                               const std::vector<double>& off,
                                               double lambda, int sweeps = 4) {
  const std::size_t n = diag.size();
  std::vector<double> sub(n, 0.0), sup(n, 0.0), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = diag[i] - lambda;
    if (i > 0) sub[i] = off[i - 1];
    if (i + 1 < n) sup[i] = off[i];
  }
  // Small diagonal shift keeps the factorization nonsingular at the exact
  // eigenvalue.
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(diag[i]));
  for (std::size_t i = 0; i < n; ++i) d[i] += 1e-12 * std::max(1.0, scale);

  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = 1.0 + 1e-3 * std::sin(1.0 + 2.0 * static_cast<double>(i));
  }
  for (int s = 0; s < sweeps; ++s) {
    v = tridiag_solve(sub, d, sup, std::move(v));
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw ConvergenceError("inverse iteration collapsed", 0);
    for (double& x : v) x /= norm;
  }
  return v;
}

}  // namespace disbec

#endif  // DISBEC_TRIDIAG_HPP

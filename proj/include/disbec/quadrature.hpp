#ifndef DISBEC_QUADRATURE_HPP
#define DISBEC_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "disbec/errors.hpp"

namespace disbec {

// Gauss-Laguerre rule: integral_0^inf e^{-t} f(t) dt ~ sum w_k f(x_k).
// Exact for polynomials of degree <= 2n-1.
struct LaguerreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes by Newton iteration on the three-term recurrence; the classical
// initial guesses keep every root bracketed for n up to a few hundred.
inline LaguerreRule gauss_laguerre(int n) {
  if (n < 2 || n > 256) throw DomainError("gauss_laguerre order out of range");
  LaguerreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * n);
    } else {
      double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - rule.nodes[i - 2]);
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // L_n(z) and its derivative via the recurrence.
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (p1 - p2) / z;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-15 * std::max(1.0, z)) break;
    }
    rule.nodes[i] = z;
    // w = x / ((n+1)^2 L_{n+1}(x)^2) = 1 / (x pp^2) * (n ... ) form below.
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n + 1; ++j) {
      double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
    }
    double np1 = n + 1.0;
    rule.weights[i] = z / (np1 * np1 * p1 * p1);
  }
  return rule;
}

// Recursive adaptive Simpson on [a,b] to absolute tolerance tol.
namespace detail {
template <typename F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm,
                            double fb, double whole, double tol, int depth,
                            int force) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  // force the first few levels: a narrow feature can fool the error
  // estimate when every probe node misses it
  if (depth <= 0 || (force <= 0 && std::fabs(delta) <= 15.0 * tol)) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1, force - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1, force - 1);
}
}  // namespace detail

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-12,
                        int max_depth = 40, int min_depth = 8) {
  if (!(b >= a)) throw DomainError("adaptive_simpson needs b >= a");
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol,
                                      max_depth, min_depth);
}

// integral_a^inf e^{-t} f(t) dt by shifting to the Laguerre rule:
// e^{-a} * sum w_k f(a + x_k).  Nodes whose shifted weight underflows the
// relative floor are skipped.
template <typename F>
double laguerre_shifted(const LaguerreRule& rule, double a, F&& f,
                        double rel_floor = 1e-30) {
  if (!(a >= 0.0)) throw DomainError("laguerre_shifted needs a >= 0");
  double scale = std::exp(-a);
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    if (rule.weights[k] < rel_floor) break;  // weights decrease with k
    sum += rule.weights[k] * f(a + rule.nodes[k]);
  }
  return scale * sum;
}

}  // namespace disbec

#endif  // DISBEC_QUADRATURE_HPP

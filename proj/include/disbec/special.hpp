#ifndef DISBEC_SPECIAL_HPP
#define DISBEC_SPECIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "disbec/errors.hpp"

namespace disbec {

// Regularized lower incomplete gamma P(a,x) by power series; valid x < a+1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by continued fraction (modified
// Lentz); valid x >= a+1.
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_p needs a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

inline double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_q needs a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

// Survival function of the chi-square distribution with dof degrees.
inline double chi2_survival(double x, int dof) {
  if (dof < 1) throw DomainError("chi-square dof must be >= 1");
  return gamma_q(0.5 * dof, 0.5 * x);
}

inline double poisson_pmf(int k, double mean) {
  if (k < 0) return 0.0;
  return std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
}

// P(X >= k0) for X ~ Poisson(mean), by direct summation of pmf terms.
inline double poisson_tail_upper(int k0, double mean) {
  if (k0 <= 0) return 1.0;
  double term = poisson_pmf(k0, mean);
  double sum = term;
  for (int k = k0 + 1; k < k0 + 100000; ++k) {
    term *= mean / k;
    sum += term;
    if (term < sum * 1e-18 && k > mean) break;
  }
  return sum;
}

// P(X <= k0) for X ~ Poisson(mean), by direct summation of pmf terms.
inline double poisson_tail_lower(int k0, double mean) {
  if (k0 < 0) return 0.0;
  double term = poisson_pmf(k0, mean);
  double sum = term;
  for (int k = k0; k >= 1; --k) {
    term *= k / mean;
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

// Kolmogorov-Smirnov sup-distance between the empirical CDF of samples and
// a model CDF.  Sorts a copy of the samples.
template <typename Cdf>
double ks_distance(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) throw DomainError("ks_distance needs samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = cdf(samples[i]);
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::fabs(f - lo), std::fabs(hi - f)));
  }
  return d;
}

// Two-sample KS distance.
inline double ks_distance_two_sample(std::vector<double> a,
                                     std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    double fa = static_cast<double>(i) / a.size();
    double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

// Asymptotic one-sample KS critical value at significance alpha.
inline double ks_critical(std::size_t n, double alpha) {
  if (n == 0) throw DomainError("ks_critical needs n > 0");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(double(n));
}

// Pearson chi-square statistic and p-value for observed counts against
// expected counts; bins with expected < min_expected are pooled into their
// right neighbor (tail pooling).
struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

inline ChiSquareResult chi_square_test(const std::vector<double>& observed,
                                       const std::vector<double>& expected,
                                       double min_expected = 5.0) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw DimensionError("chi_square_test needs matching nonempty arrays");
  }
  std::vector<double> obs, exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += expected[i];
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 && !exp.empty()) {
    obs.back() += o_acc;
    exp.back() += e_acc;
  }
  if (exp.size() < 2) throw DomainError("too few populated bins");
  ChiSquareResult r;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    double diff = obs[i] - exp[i];
    r.statistic += diff * diff / exp[i];
  }
  r.dof = static_cast<int>(exp.size()) - 1;
  r.p_value = chi2_survival(r.statistic, r.dof);
  return r;
}

// Sample Pearson correlation of (x_i, y_i).
inline double correlation(const std::vector<double>& x,
                          const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DimensionError("correlation needs two arrays of equal size >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace disbec

#endif  // DISBEC_SPECIAL_HPP

// Test-only reference implementations that deliberately avoid the library's
// solution paths, so agreement is evidence rather than tautology.
#ifndef DISBEC_TESTS_ORACLES_HPP
#define DISBEC_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// Hard-wall single-interval ground state by shooting on the Euler-Lagrange
// equation -phi'' + kappa phi^3 = lambda phi, phi(0) = 0, phi'(0) = s.
// Inner bisection picks lambda so phi(1) = 0 on the nodeless branch; outer
// bisection picks s for unit mass.  RK4 with N steps; quadratures by
// composite Simpson on the stored trajectory.
struct ShootingResult {
  double energy = 0.0;
  double lambda = 0.0;
  double quartic = 0.0;
};

namespace detail {

struct Traj {
  double phi1 = 0.0;
  bool dipped = false;  // phi < 0 strictly inside (past the first node)
  double mass = 0.0, quart = 0.0, kin = 0.0;
};

inline Traj integrate(double kappa, double lambda, double s, int N) {
  double h = 1.0 / N;
  double y = 0.0, p = s;
  std::vector<double> y2(N + 1), y4(N + 1), p2(N + 1);
  y2[0] = 0.0;
  y4[0] = 0.0;
  p2[0] = s * s;
  Traj t;
  auto f = [&](double yy) { return kappa * yy * yy * yy - lambda * yy; };
  for (int i = 0; i < N; ++i) {
    double k1y = p, k1p = f(y);
    double k2y = p + 0.5 * h * k1p, k2p = f(y + 0.5 * h * k1y);
    double k3y = p + 0.5 * h * k2p, k3p = f(y + 0.5 * h * k2y);
    double k4y = p + h * k3p, k4p = f(y + h * k3y);
    y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    if (y < 0.0 && i + 1 < N) t.dipped = true;
    y2[i + 1] = y * y;
    y4[i + 1] = y2[i + 1] * y2[i + 1];
    p2[i + 1] = p * p;
  }
  t.phi1 = y;
  auto simpson = [&](const std::vector<double>& v) {
    double acc = v[0] + v[N];
    for (int i = 1; i < N; ++i) acc += (i % 2 ? 4.0 : 2.0) * v[i];
    return acc * h / 3.0;
  };
  t.mass = simpson(y2);
  t.quart = simpson(y4);
  t.kin = simpson(p2);
  return t;
}

inline double lambda_for(double kappa, double s, int N) {
  double lo = 0.0, hi = M_PI * M_PI;
  while (true) {
    Traj t = integrate(kappa, hi, s, N);
    if (t.phi1 < 0.0 || t.dipped) break;
    lo = hi;
    hi *= 2.0;
    if (hi > 1e14) throw std::runtime_error("shooting: lambda bracket failed");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    Traj t = integrate(kappa, mid, s, N);
    (t.phi1 < 0.0 || t.dipped ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline ShootingResult shoot_interval_energy(double kappa, int N = 4000) {
  using detail::integrate;
  using detail::lambda_for;
  double slo = 1e-3, shi = 1.0;
  while (integrate(kappa, lambda_for(kappa, shi, N), shi, N).mass < 1.0) {
    shi *= 2.0;
    if (shi > 1e8) throw std::runtime_error("shooting: s bracket failed");
  }
  while (integrate(kappa, lambda_for(kappa, slo, N), slo, N).mass > 1.0) {
    slo *= 0.5;
    if (slo < 1e-12) throw std::runtime_error("shooting: s bracket failed");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (slo + shi);
    if (mid == slo || mid == shi) break;
    double lam = lambda_for(kappa, mid, N);
    (integrate(kappa, lam, mid, N).mass < 1.0 ? slo : shi) = mid;
  }
  double s = 0.5 * (slo + shi);
  double lam = lambda_for(kappa, s, N);
  detail::Traj t = integrate(kappa, lam, s, N);
  ShootingResult r;
  r.lambda = lam;
  r.quartic = t.quart;
  r.energy = t.kin + 0.5 * kappa * t.quart;
  return r;
}

// Golden-section minimization of a scalar unimodal function on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a,
                         double b, double tol = 1e-12) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol * (1.0 + std::fabs(a) + std::fabs(b))) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace oracles

#endif  // DISBEC_TESTS_ORACLES_HPP

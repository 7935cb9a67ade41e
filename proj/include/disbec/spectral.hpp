#ifndef DISBEC_SPECTRAL_HPP
#define DISBEC_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "disbec/errors.hpp"
#include "disbec/model.hpp"
#include "disbec/tridiag.hpp"

namespace disbec {

// Potential W = smooth part + sigma * sum_j w_j delta(z - z_j) on [0,1],
// W >= 0 throughout.  Delta strengths must be finite here; hard walls are
// handled by the interval decomposition, not by this spectral layer.
struct PotentialSpec {
  GridFunction smooth;      // may be empty (W has no smooth part)
  ScattererConfig deltas;   // may be empty (no point scatterers)
  double integral_W = 0.0;  // int smooth + sigma * sum of weights

  bool has_deltas() const { return deltas.m() > 0; }

  double smooth_at(double x) const {
    return smooth.values.empty() ? 0.0 : smooth.value_at(x);
  }

  double delta_mass() const {
    if (deltas.m() == 0) return 0.0;
    double w = 0.0;
    for (double wi : deltas.weights) w += wi;
    return deltas.strength * w;
  }
};

inline PotentialSpec make_potential(GridFunction smooth,
                                    ScattererConfig deltas = {}) {
  if (deltas.m() > 0 && is_infinite(deltas.strength)) {
    throw DomainError("spectral potentials need finite delta strength");
  }
  for (double v : smooth.values) {
    if (!(v >= 0.0)) throw DomainError("smooth potential part must be >= 0");
  }
  PotentialSpec p;
  p.smooth = std::move(smooth);
  p.deltas = std::move(deltas);
  p.integral_W = (p.smooth.values.empty() ? 0.0 : p.smooth.moment(1)) +
                 p.delta_mass();
  return p;
}

inline PotentialSpec free_potential() { return PotentialSpec{}; }

struct GapBound {
  double eta = 0.0;
  double bound = 0.0;
};

// eta^2 = pi^2 + 3 int W; the two-sided gap estimate gives
// gap >= eta ln(1 + pi e^{-2 eta}) for continuous W and the weaker
// gap >= eta ln(1 + e^{-2 eta}) once point scatterers are present.
inline GapBound gap_lower_bound(double integral_W, bool has_deltas) {
  if (!(integral_W >= 0.0)) {
    throw DomainError("gap_lower_bound needs integral_W >= 0");
  }
  GapBound r;
  r.eta = std::sqrt(M_PI * M_PI + 3.0 * integral_W);
  double amp = has_deltas ? 1.0 : M_PI;
  r.bound = r.eta * std::log1p(amp * std::exp(-2.0 * r.eta));
  return r;
}

struct SpectrumResult {
  std::vector<double> eigenvalues;  // increasing, size k
  double gap = 0.0;                 // e1 - e0
  double eta = 0.0;
  double gap_bound = 0.0;
  double snap_error = 0.0;  // max |z_j - snapped node|, <= h/2
};

inline void to_json(nlohmann::json& j, const SpectrumResult& r) {
  j = nlohmann::json{{"eigenvalues", r.eigenvalues},
                     {"gap", r.gap},
                     {"eta", r.eta},
                     {"gap_bound", r.gap_bound},
                     {"snap_error", r.snap_error}};
}

namespace spectral_detail {

inline int snap_index(double z, int M, double h) {
  int i = static_cast<int>(std::lround(z / h)) - 1;
  return std::clamp(i, 0, M - 1);
}

// Symmetric tridiagonal finite-difference discretization of -d^2/dz^2 + W
// with Dirichlet walls; each delta is lumped as sigma*w/h at the nearest
// interior node.
inline std::vector<double> lowest_eigs_fd(const PotentialSpec& p, int k,
                                          int M, double* snap_error) {
  double h = 1.0 / (M + 1);
  std::vector<double> diag(M), off(M > 1 ? M - 1 : 0, -1.0 / (h * h));
  for (int i = 0; i < M; ++i) {
    diag[i] = 2.0 / (h * h) + p.smooth_at((i + 1) * h);
  }
  double snap = 0.0;
  for (int j = 0; j < p.deltas.m(); ++j) {
    double z = p.deltas.positions[j];
    int i = snap_index(z, M, h);
    diag[i] += p.deltas.strength * p.deltas.weights[j] / h;
    snap = std::max(snap, std::fabs(z - (i + 1) * h));
  }
  if (snap_error) *snap_error = snap;
  return tridiag_lowest_eigenvalues(diag, off, k, 1e-10);
}

}  // namespace spectral_detail

inline SpectrumResult eigs(const PotentialSpec& p, int k, int M,
                           bool richardson = false) {
  if (k < 2) throw DomainError("eigs needs k >= 2");
  if (M < 64) throw ResolutionError("eigs needs M >= 64");
  if (k > M) throw DimensionError("cannot ask for more eigenvalues than nodes");
  SpectrumResult r;
  r.eigenvalues = spectral_detail::lowest_eigs_fd(p, k, M, &r.snap_error);
  if (richardson) {
    std::vector<double> fine =
        spectral_detail::lowest_eigs_fd(p, k, 2 * M + 1, nullptr);
    for (int j = 0; j < k; ++j) {
      r.eigenvalues[j] = (4.0 * fine[j] - r.eigenvalues[j]) / 3.0;
    }
  }
  r.gap = r.eigenvalues[1] - r.eigenvalues[0];
  GapBound b = gap_lower_bound(p.integral_W, p.has_deltas());
  r.eta = b.eta;
  r.gap_bound = b.bound;
  return r;
}

// Prufer angle for u'' = (W - E) u with u = r cos(theta),
// u' = -eta r sin(theta): theta' = (E - W) cos^2(theta)/eta
// + eta sin^2(theta), theta(0) = -pi/2.  theta is strictly increasing in E,
// and the j-th Dirichlet eigenvalue is the unique E with
// theta(1, E) = pi/2 + j pi.  A delta of mass s jumps u' by s*u, i.e.
// tan(theta+) = tan(theta-) - s/eta within the same branch; if u = 0 at the
// scatterer the jump has no effect.
inline double prufer_theta(const PotentialSpec& p, double E, int M) {
  if (!(E > 0.0)) throw DomainError("prufer_theta needs E > 0");
  if (M < 64) throw ResolutionError("prufer_theta needs M >= 64");
  double eta = gap_lower_bound(p.integral_W, p.has_deltas()).eta;
  double step_target = 0.25 / (M + 1);

  auto rate = [&](double z, double th) {
    double c = std::cos(th), s = std::sin(th);
    return (E - p.smooth_at(z)) * c * c / eta + eta * s * s;
  };

  double theta = -0.5 * M_PI;
  double z = 0.0;
  auto advance_to = [&](double zend) {
    double len = zend - z;
    if (len <= 0.0) return;
    int n = std::max(1, static_cast<int>(std::ceil(len / step_target)));
    double dz = len / n;
    for (int i = 0; i < n; ++i) {
      double k1 = rate(z, theta);
      double k2 = rate(z + 0.5 * dz, theta + 0.5 * dz * k1);
      double k3 = rate(z + 0.5 * dz, theta + 0.5 * dz * k2);
      double k4 = rate(z + dz, theta + dz * k3);
      theta += dz / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      z += dz;
    }
    z = zend;
  };

  for (int j = 0; j < p.deltas.m(); ++j) {
    advance_to(p.deltas.positions[j]);
    double c = std::cos(theta);
    if (std::fabs(c) > 1e-14) {
      double branch = std::round(theta / M_PI);
      double local = theta - branch * M_PI;  // in (-pi/2, pi/2)
      double jump = p.deltas.strength * p.deltas.weights[j] / eta;
      theta = branch * M_PI + std::atan(std::tan(local) - jump);
    }
  }
  advance_to(1.0);
  return theta;
}

// Independent eigenvalue route: bisection on the strictly increasing map
// E -> theta(1, E).  Cross-validates the tridiagonal solver; the deltas
// enter through exact jump conditions at the exact positions here, versus
// nearest-node lumping there.
inline std::vector<double> eigs_by_shooting(const PotentialSpec& p, int k,
                                            int M = 2048) {
  if (k < 1) throw DomainError("eigs_by_shooting needs k >= 1");
  std::vector<double> out;
  out.reserve(k);
  for (int j = 0; j < k; ++j) {
    double target = 0.5 * M_PI + j * M_PI;
    double lo = 1e-9;
    double hi =
        (j + 1.0) * (j + 1.0) * M_PI * M_PI + 2.0 * (j + 1.0) * p.integral_W;
    int grow = 0;
    while (prufer_theta(p, hi, M) < target) {
      hi *= 2.0;
      if (++grow > 60) throw BracketError("shooting bracket expansion failed");
    }
    for (int it = 0; it < 200; ++it) {
      if (hi - lo <= 1e-8 * std::max(1.0, hi)) break;
      double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (prufer_theta(p, mid, M) < target ? lo : hi) = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

struct MeanFieldHamiltonian {
  PotentialSpec potential;
  double shift = 0.0;  // -(gamma/2) int psi0^4, added to eigenvalues of h
};

// Mean-field operator -d^2/dz^2 + V + gamma psi0^2 - (gamma/2) int psi0^4
// for a GP minimizer psi0.  The minimizer is a discrete eigenfunction of
// the unshifted operator with eigenvalue equal to its GP energy plus
// (gamma/2) int psi0^4; the residual of that identity is checked here and
// a violation means psi0 is not the minimizer it claims to be.
inline MeanFieldHamiltonian mean_field_hamiltonian(const GridFunction& psi0,
                                                   const ScattererConfig& cfg,
                                                   double gamma,
                                                   double residual_tol = 1e-5) {
  if (!(gamma >= 0.0)) throw DomainError("gamma must be >= 0");
  if (psi0.values.empty()) throw DimensionError("psi0 is empty");
  MeanFieldHamiltonian mf;
  GridFunction sq(psi0.grid);
  for (int i = 0; i < psi0.grid.M; ++i) {
    sq.values[i] = gamma * psi0.values[i] * psi0.values[i];
  }
  mf.potential = make_potential(std::move(sq), cfg);
  mf.shift = -0.5 * gamma * psi0.moment(4);

  // Residual check of h psi0 = rho psi0 on psi0's own grid.
  int M = psi0.grid.M;
  double h = psi0.grid.h;
  std::vector<double> hv(M);
  std::vector<double> wdiag(M, 0.0);
  for (int j = 0; j < cfg.m(); ++j) {
    int i = spectral_detail::snap_index(cfg.positions[j], M, h);
    wdiag[i] += cfg.strength * cfg.weights[j] / h;
  }
  const std::vector<double>& v = psi0.values;
  for (int i = 0; i < M; ++i) {
    double left = (i > 0) ? v[i - 1] : 0.0;
    double right = (i + 1 < M) ? v[i + 1] : 0.0;
    hv[i] = (2.0 * v[i] - left - right) / (h * h) +
            (mf.potential.smooth.values[i] + wdiag[i]) * v[i];
  }
  double num = 0.0, den = 0.0;
  for (int i = 0; i < M; ++i) {
    num += hv[i] * v[i];
    den += v[i] * v[i];
  }
  double rho = num / den;
  double res2 = 0.0;
  for (int i = 0; i < M; ++i) {
    double d = hv[i] - rho * v[i];
    res2 += d * d;
  }
  double rel = std::sqrt(res2 / den) / std::max(1.0, std::fabs(rho));
  if (rel > residual_tol) {
    throw ConsistencyError("psi0 is not an eigenfunction of its mean field");
  }
  return mf;
}

// Up-to-constant depletion estimate
// constant * (e0/(ek - e0)) * N^{-1/3} * min(sqrt(gamma), gamma).
inline double depletion_bound(double e0, double ek, double gamma, double N,
                              double constant = 1.0) {
  if (!(ek > e0)) throw DomainError("depletion_bound needs ek > e0");
  if (!(N >= 1.0)) throw DomainError("depletion_bound needs N >= 1");
  if (!(gamma >= 0.0)) throw DomainError("gamma must be >= 0");
  return constant * (e0 / (ek - e0)) * std::pow(N, -1.0 / 3.0) *
         std::min(std::sqrt(gamma), gamma);
}

}  // namespace disbec

#endif  // DISBEC_SPECTRAL_HPP

#ifndef DISBEC_MINIMIZE_HPP
#define DISBEC_MINIMIZE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "disbec/errors.hpp"
#include "disbec/tridiag.hpp"

namespace disbec {

// Minimization of
//   E(phi) = sum_cells (phi_{i+1}-phi_i)^2 / h
//          + phi^T X phi
//          + (quartic/2) * h * sum_i w_i phi_i^4
// over the sphere  h * sum_i w_i phi_i^2 = 1.
//
// X is a symmetric tridiagonal "extras" form holding boundary penalties and
// delta scatterer terms; keeping it separate from the kinetic part lets the
// kinetic gradient be evaluated as a difference of cell differences, which
// avoids the 1/h^2 cancellation noise that would otherwise dominate the
// residual on fine grids.
//
// zero_left/zero_right: whether an implied zero node borders the vector
// (Dirichlet wall).  pinned nodes are held at exactly zero and carry no
// quadrature weight (used for infinitely strong scatterers).
struct SphereProblem {
  double h = 0.0;
  bool zero_left = true;
  bool zero_right = true;
  double quartic = 0.0;
  std::vector<double> w;             // quadrature weights, 0 on pinned nodes
  std::vector<double> xdiag, xoff;   // extras: sum xdiag_i p_i^2 + 2 xoff_i p_i p_{i+1}
  std::vector<std::uint8_t> pinned;  // 1 = held at zero

  std::size_t size() const { return w.size(); }
};

inline SphereProblem make_sphere_problem(std::size_t n, double h,
                                         double quartic, bool zero_left = true,
                                         bool zero_right = true) {
  SphereProblem p;
  p.h = h;
  p.zero_left = zero_left;
  p.zero_right = zero_right;
  p.quartic = quartic;
  p.w.assign(n, 1.0);
  if (!zero_left) p.w.front() = 0.5;
  if (!zero_right) p.w.back() = 0.5;
  p.xdiag.assign(n, 0.0);
  p.xoff.assign(n > 0 ? n - 1 : 0, 0.0);
  p.pinned.assign(n, 0);
  return p;
}

struct MinimizeOptions {
  int max_iter = 50000;
  double tol_root = 1e-8;  // residual norm / max(1, |lambda|)
};

struct MinimizeResult {
  double energy = 0.0;
  double lambda = 0.0;  // Lagrange multiplier (chemical potential)
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline double sphere_weighted_norm2(const SphereProblem& p,
                                    const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p.w[i] * v[i] * v[i];
  return p.h * s;
}

inline void sphere_enforce(const SphereProblem& p, std::vector<double>& v) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.pinned[i]) {
      v[i] = 0.0;
    } else {
      v[i] = std::fabs(v[i]);  // E(|phi|) <= E(phi); ground states are >= 0
    }
  }
  double n2 = sphere_weighted_norm2(p, v);
  if (!(n2 > 0.0)) throw DomainError("sphere projection hit the zero vector");
  double inv = 1.0 / std::sqrt(n2);
  for (double& x : v) x *= inv;
}

// Cell differences d_c = phi_right - phi_left including implied zero walls.
// cells.size() = n - 1 + zero_left + zero_right.
inline void cell_differences(const SphereProblem& p,
                             const std::vector<double>& v,
                             std::vector<double>& d) {
  const std::size_t n = p.size();
  d.clear();
  if (p.zero_left) d.push_back(v[0]);
  for (std::size_t i = 0; i + 1 < n; ++i) d.push_back(v[i + 1] - v[i]);
  if (p.zero_right) d.push_back(-v[n - 1]);
}

inline double sphere_energy(const SphereProblem& p,
                            const std::vector<double>& v,
                            std::vector<double>& scratch) {
  const std::size_t n = p.size();
  cell_differences(p, v, scratch);
  double kin = 0.0;
  for (double d : scratch) kin += d * d;
  kin /= p.h;
  double extra = 0.0;
  for (std::size_t i = 0; i < n; ++i) extra += p.xdiag[i] * v[i] * v[i];
  for (std::size_t i = 0; i + 1 < n; ++i)
    extra += 2.0 * p.xoff[i] * v[i] * v[i + 1];
  double quart = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v2 = v[i] * v[i];
    quart += p.w[i] * v2 * v2;
  }
  quart *= 0.5 * p.quartic * p.h;
  return kin + extra + quart;
}

// Coordinate gradient g_i = dE/dphi_i.  The kinetic part uses the cell
// differences directly so adjacent values never cancel at O(phi).
inline void sphere_gradient(const SphereProblem& p,
                            const std::vector<double>& v,
                            std::vector<double>& d, std::vector<double>& g) {
  const std::size_t n = p.size();
  cell_differences(p, v, d);
  g.assign(n, 0.0);
  // Node i touches cell (i-1+zl, i+zl): grad = 2 (d_left - d_right) / h.
  const std::size_t zl = p.zero_left ? 1 : 0;
  for (std::size_t i = 0; i < n; ++i) {
    double left = (i + zl >= 1) ? d[i + zl - 1] : 0.0;
    double right = (i + zl < d.size()) ? d[i + zl] : 0.0;
    g[i] = 2.0 * (left - right) / p.h;
  }
  for (std::size_t i = 0; i < n; ++i) {
    g[i] += 2.0 * p.xdiag[i] * v[i];
    if (i + 1 < n) g[i] += 2.0 * p.xoff[i] * v[i + 1];
    if (i >= 1) g[i] += 2.0 * p.xoff[i - 1] * v[i - 1];
  }
  double qc = 2.0 * p.quartic * p.h;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] += qc * p.w[i] * v[i] * v[i] * v[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (p.pinned[i]) g[i] = 0.0;
  }
}

}  // namespace detail

// Energy and coordinate gradient of a SphereProblem at v (for testing the
// analytic gradient against finite differences).
inline double sphere_energy(const SphereProblem& p,
                            const std::vector<double>& v) {
  std::vector<double> scratch;
  return detail::sphere_energy(p, v, scratch);
}

inline std::vector<double> sphere_gradient(const SphereProblem& p,
                                           const std::vector<double>& v) {
  std::vector<double> d, g;
  detail::sphere_gradient(p, v, d, g);
  return g;
}

namespace detail {

// Gradient, multiplier, residual, and normalized residual norm at v.
// g_i = h w_i G_i, so G recovers the operator action H[v] v, and
// R = G - lambda v is the sphere-projected first-order condition.
struct SphereState {
  double energy = 0.0;
  double lambda = 0.0;
  double rnorm = 0.0;  // ||R||_w / max(1, |lambda|)
};

inline SphereState sphere_state(const SphereProblem& p,
                                const std::vector<double>& v,
                                std::vector<double>& d, std::vector<double>& g,
                                std::vector<double>& resid) {
  const std::size_t n = p.size();
  SphereState s;
  s.energy = sphere_energy(p, v, d);
  sphere_gradient(p, v, d, g);
  for (std::size_t i = 0; i < n; ++i) s.lambda += g[i] * v[i];
  s.lambda *= 0.5;  // <G, v>_w with unit weighted norm
  double rnorm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.w[i] > 0.0) {
      double r = 0.5 * g[i] / (p.h * p.w[i]) - s.lambda * v[i];
      resid[i] = r;
      rnorm2 += p.w[i] * r * r;
    } else {
      resid[i] = 0.0;
    }
  }
  s.rnorm = std::sqrt(p.h * rnorm2) / std::max(1.0, std::fabs(s.lambda));
  return s;
}

}  // namespace detail

// Preconditioned projected descent on the weighted L2 sphere.
//
// Direction: P^{-1} R with the Sobolev-gradient preconditioner
// P = 1 - d^2/dx^2 + extras + 3 kappa v^2, in the same operator units
// as G.  P is deliberately NOT shifted by lambda: a lambda shift turns
// the solve nearly diagonal whenever the iterate is far from the ground
// state (lambda large), making steps ultra-local; this form stays
// positive definite and globally smoothing throughout.
//
// Acceptance: strict energy decrease while it is available; once energy
// sits at its floating-point floor, a step is still accepted when it
// shrinks the residual norm (the preconditioned fixed-point map is
// locally contractive, so this polishes the residual one to two decades
// below where the energy test alone would stall).  Converged when the
// normalized residual drops below tol_root.
inline MinimizeResult sphere_minimize(const SphereProblem& p,
                                      std::vector<double>& v,
                                      const MinimizeOptions& opt = {}) {
  const std::size_t n = p.size();
  if (v.size() != n) throw DimensionError("start vector size mismatch");
  detail::sphere_enforce(p, v);

  std::vector<double> d, g, resid(n), dir, trial(n), tresid(n);
  std::vector<double> sub(n), diag(n), sup(n);

  detail::SphereState st = detail::sphere_state(p, v, d, g, resid);
  MinimizeResult res;

  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    res.energy = st.energy;
    res.lambda = st.lambda;
    res.grad_norm = st.rnorm;
    res.iterations = iter;
    if (st.rnorm < opt.tol_root) {
      res.converged = true;
      return res;
    }

    for (std::size_t i = 0; i < n; ++i) {
      double wgt = p.w[i] > 0.0 ? p.w[i] : 1.0;
      double cells = 0.0;
      if (i > 0 || p.zero_left) cells += 1.0;
      if (i + 1 < n || p.zero_right) cells += 1.0;
      diag[i] = 1.0 + cells / (p.h * p.h * wgt) + p.xdiag[i] / (p.h * wgt) +
                3.0 * p.quartic * v[i] * v[i];
      sub[i] = sup[i] = 0.0;
      if (i > 0) sub[i] = -1.0 / (p.h * p.h * wgt) + p.xoff[i - 1] / (p.h * wgt);
      if (i + 1 < n) sup[i] = -1.0 / (p.h * p.h * wgt) + p.xoff[i] / (p.h * wgt);
      if (p.pinned[i]) {
        diag[i] = 1.0;
        sub[i] = sup[i] = 0.0;
      }
    }
    dir = tridiag_solve(sub, diag, sup, resid);

    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60 && !accepted; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = v[i] - step * dir[i];
      detail::sphere_enforce(p, trial);
      double etrial = detail::sphere_energy(p, trial, d);
      if (etrial < st.energy) {
        v.swap(trial);
        st = detail::sphere_state(p, v, d, g, resid);
        accepted = true;
      } else {
        detail::SphereState ts = detail::sphere_state(p, trial, d, g, tresid);
        if (ts.rnorm < st.rnorm) {
          v.swap(trial);
          resid.swap(tresid);
          st = ts;
          accepted = true;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Neither metric can improve at any step size: numerical floor.
      res.energy = st.energy;
      res.lambda = st.lambda;
      res.grad_norm = st.rnorm;
      res.converged = st.rnorm < opt.tol_root;
      if (!res.converged) {
        throw ConvergenceError("sphere_minimize: stalled above tolerance",
                               st.rnorm);
      }
      return res;
    }
  }
  throw ConvergenceError("sphere_minimize: step budget exhausted", st.rnorm);
}

}  // namespace disbec

#endif  // DISBEC_MINIMIZE_HPP

#ifndef DISBEC_AUX_INTERVAL_HPP
#define DISBEC_AUX_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "disbec/errors.hpp"
#include "disbec/minimize.hpp"
#include "disbec/model.hpp"

namespace disbec {

// Single-interval problem: minimize
//   e(kappa, alpha) = int |phi'|^2 + (kappa/2) int |phi|^4
//                   + (alpha/2) (phi(0)^2 + phi(1)^2)
// over unit-L2-norm phi on [0,1].  alpha = infinity means hard walls.

struct AuxResult {
  double kappa = 0.0;
  double alpha = kInfiniteStrength;
  double energy = 0.0;
  // Interior-node restriction of the minimizer.  For finite alpha the solve
  // carries free boundary unknowns; those are dropped here and the interior
  // trapezoid norm is then 1 - O(h) (the boundary half-cells hold the rest).
  GridFunction minimizer;
  double quartic_integral = 0.0;   // int |phi|^4 on the solving grid
  MinimizeResult info;
};

// e(0, alpha) = b^2 where b in [0, pi] satisfies the natural boundary
// condition phi'(0) = (alpha/2) phi(0) for phi = cos(b(x - 1/2)), i.e.
// b tan(b/2) = alpha/2.  Solved as b sin(b/2) - (alpha/2) cos(b/2) = 0,
// which is increasing on [0, pi] and free of the tan singularity.
inline double kappa0_energy(double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0 (may be infinite)");
  if (alpha == 0.0) return 0.0;
  if (is_infinite(alpha)) return M_PI * M_PI;
  auto f = [alpha](double b) {
    return b * std::sin(0.5 * b) - 0.5 * alpha * std::cos(0.5 * b);
  };
  double lo = 0.0, hi = M_PI;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  double b = 0.5 * (lo + hi);
  return b * b;
}

namespace aux_detail {

// Grid of the discretized problem: interior nodes only for hard walls,
// extended by the two endpoint nodes (free unknowns) for finite alpha.
inline SphereProblem make_problem(double kappa, double alpha, int M) {
  Grid grid = build_grid(M);
  if (is_infinite(alpha)) {
    return make_sphere_problem(static_cast<std::size_t>(M), grid.h, kappa);
  }
  SphereProblem p = make_sphere_problem(static_cast<std::size_t>(M) + 2,
                                        grid.h, kappa,
                                        /*zero_left=*/false,
                                        /*zero_right=*/false);
  p.xdiag.front() += 0.5 * alpha;
  p.xdiag.back() += 0.5 * alpha;
  return p;
}

inline std::vector<double> make_start(double alpha, const SphereProblem& p) {
  const std::size_t n = p.size();
  std::vector<double> v(n);
  if (is_infinite(alpha)) {
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = std::sin(M_PI * (static_cast<double>(i) + 1.0) * p.h);
    }
  } else {
    // cos(b(x - 1/2)) is the exact kappa = 0 minimizer shape; at alpha = 0
    // it degenerates to the constant.
    double b = std::sqrt(kappa0_energy(alpha));
    for (std::size_t i = 0; i < n; ++i) {
      double x = static_cast<double>(i) * p.h;
      v[i] = std::cos(b * (x - 0.5));
    }
  }
  return v;
}

}  // namespace aux_detail

// start: optional initial vector on the solving grid (size M for infinite
// alpha, M + 2 including endpoints otherwise); the default is the exact
// kappa = 0 minimizer shape.
inline AuxResult solve_aux(double kappa, double alpha, int M,
                           const MinimizeOptions& opt = {},
                           std::vector<double> start = {}) {
  if (!(kappa >= 0.0)) throw DomainError("kappa must be >= 0");
  if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0 (may be infinite)");
  SphereProblem p = aux_detail::make_problem(kappa, alpha, M);
  std::vector<double> v =
      start.empty() ? aux_detail::make_start(alpha, p) : std::move(start);

  AuxResult r;
  r.kappa = kappa;
  r.alpha = alpha;
  r.info = sphere_minimize(p, v, opt);
  r.energy = r.info.energy;

  double quart = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double v2 = v[i] * v[i];
    quart += p.w[i] * v2 * v2;
  }
  r.quartic_integral = p.h * quart;

  r.minimizer.grid = build_grid(M);
  if (is_infinite(alpha)) {
    r.minimizer.values = std::move(v);
  } else {
    r.minimizer.values.assign(v.begin() + 1, v.end() - 1);
  }
  return r;
}

// Richardson-extrapolated energy from the M and 2M+1 grids (h halves
// exactly, so the O(h^2) error cancels).
inline double solve_aux_refined(double kappa, double alpha, int M,
                                const MinimizeOptions& opt = {}) {
  double coarse = solve_aux(kappa, alpha, M, opt).energy;
  double fine = solve_aux(kappa, alpha, 2 * M + 1, opt).energy;
  return (4.0 * fine - coarse) / 3.0;
}

// Memoized monotone table of kappa -> e(kappa, alpha) with derivative
// estimates at the knots, interpolated by a cubic Hermite.  Knot slopes
// live in [1/2, 3/4], which also guarantees the interpolant is monotone.
class AuxTable {
 public:
  AuxTable(double alpha, std::vector<double> kappas, std::vector<double> e,
           std::vector<double> de)
      : alpha_(alpha),
        kappas_(std::move(kappas)),
        e_(std::move(e)),
        de_(std::move(de)) {
    validate();
  }

  double alpha() const { return alpha_; }
  double kappa_max() const { return kappas_.back(); }
  const std::vector<double>& kappa_knots() const { return kappas_; }
  const std::vector<double>& energy_knots() const { return e_; }
  const std::vector<double>& derivative_knots() const { return de_; }

  double e_at(double kappa) const { return eval(kappa).first; }
  double de_at(double kappa) const { return eval(kappa).second; }

  nlohmann::json to_json() const {
    nlohmann::json knots = nlohmann::json::array();
    for (std::size_t i = 0; i < kappas_.size(); ++i) {
      knots.push_back({kappas_[i], e_[i], de_[i]});
    }
    nlohmann::json j;
    if (is_infinite(alpha_)) {
      j["alpha"] = "inf";
    } else {
      j["alpha"] = alpha_;
    }
    j["knots"] = std::move(knots);
    return j;
  }

  static AuxTable from_json(const nlohmann::json& j) {
    double alpha;
    if (j.at("alpha").is_string()) {
      if (j["alpha"].get<std::string>() != "inf") {
        throw IoError("alpha must be a number or \"inf\"");
      }
      alpha = kInfiniteStrength;
    } else {
      alpha = j["alpha"].get<double>();
    }
    std::vector<double> kappas, e, de;
    for (const auto& knot : j.at("knots")) {
      if (!knot.is_array() || knot.size() != 3) {
        throw IoError("each knot must be [kappa, e, de]");
      }
      kappas.push_back(knot[0].get<double>());
      e.push_back(knot[1].get<double>());
      de.push_back(knot[2].get<double>());
    }
    return AuxTable(alpha, std::move(kappas), std::move(e), std::move(de));
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << to_json().dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
  }

  static AuxTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& ex) {
      throw IoError("malformed table file " + path + ": " + ex.what());
    }
    return from_json(j);
  }

 private:
  // Cubic Hermite value and derivative on the bracketing knot interval.
  std::pair<double, double> eval(double kappa) const {
    if (!(kappa >= 0.0)) throw DomainError("kappa must be >= 0");
    if (kappa > kappas_.back()) {
      throw TableRangeError("kappa beyond table range");
    }
    auto it = std::upper_bound(kappas_.begin(), kappas_.end(), kappa);
    std::size_t hi = std::min<std::size_t>(it - kappas_.begin(),
                                           kappas_.size() - 1);
    std::size_t lo = hi - (hi > 0 ? 1 : 0);
    if (hi == lo) return {e_[lo], de_[lo]};
    double w = kappas_[hi] - kappas_[lo];
    double t = (kappa - kappas_[lo]) / w;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    double val = h00 * e_[lo] + h10 * w * de_[lo] + h01 * e_[hi] +
                 h11 * w * de_[hi];
    double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
    double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
    double der = (d00 * e_[lo] + d01 * e_[hi]) / w + d10 * de_[lo] +
                 d11 * de_[hi];
    return {val, der};
  }

  void validate() const {
    const std::size_t k = kappas_.size();
    if (k < 2 || e_.size() != k || de_.size() != k) {
      throw TableError("table needs >= 2 aligned knots");
    }
    if (kappas_.front() != 0.0) throw TableError("first knot must be kappa=0");
    for (std::size_t i = 0; i < k; ++i) {
      if (!std::isfinite(kappas_[i]) || !std::isfinite(e_[i]) ||
          !std::isfinite(de_[i])) {
        throw TableError("non-finite knot entry");
      }
      if (i > 0 && !(kappas_[i] > kappas_[i - 1])) {
        throw TableError("kappa knots must be strictly increasing");
      }
      if (de_[i] < 0.5 - 1e-9 || de_[i] > 0.75 + 1e-9) {
        throw TableError("knot slope outside [1/2, 3/4]");
      }
    }
    const double tol = 1e-6 * std::max(1.0, std::fabs(e_.back()));
    double prev_secant = 0.75;  // e' <= 3/4 everywhere
    double prev_convex = -kInfiniteStrength;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      double dk = kappas_[i + 1] - kappas_[i];
      double secant = (e_[i + 1] - e_[i]) / dk;
      if (secant < 0.5 - 1e-6 || secant > 0.75 + 1e-6) {
        throw TableError("secant slope outside [1/2, 3/4]");
      }
      if (secant > prev_secant + tol / dk) {
        throw TableError("e(kappa) not concave across knots");
      }
      prev_secant = secant;
      double convex =
          (kappas_[i + 1] * e_[i + 1] - kappas_[i] * e_[i]) / dk;
      if (convex <= prev_convex) {
        throw TableError("kappa*e(kappa) not strictly convex across knots");
      }
      prev_convex = convex;
    }
  }

  double alpha_;
  std::vector<double> kappas_;
  std::vector<double> e_, de_;
};

// Builds the memoization table: knot 0 plus a geometric ladder up to
// kappa_max, energies Richardson-refined, knot slopes from centered
// differences clamped to the proved [1/2, 3/4] band.
inline AuxTable build_aux_table(double alpha, double kappa_max, int knots,
                                int M = 1023, const MinimizeOptions& opt = {}) {
  if (knots < 32) throw DomainError("need >= 32 knots");
  if (!(kappa_max > 0.0) || std::isinf(kappa_max)) {
    throw DomainError("kappa_max must be positive and finite");
  }
  std::vector<double> kappas(static_cast<std::size_t>(knots));
  kappas[0] = 0.0;
  double k1 = std::min(0.05, kappa_max / 16.0);
  double q = std::pow(kappa_max / k1, 1.0 / (knots - 2));
  for (int j = 1; j < knots; ++j) {
    kappas[static_cast<std::size_t>(j)] = k1 * std::pow(q, j - 1);
  }
  kappas.back() = kappa_max;  // guard against pow round-off

  std::vector<double> e(kappas.size());
  e[0] = kappa0_energy(alpha);
  for (std::size_t j = 1; j < kappas.size(); ++j) {
    e[j] = solve_aux_refined(kappas[j], alpha, M, opt);
  }

  std::vector<double> de(kappas.size());
  auto clamp = [](double s) { return std::clamp(s, 0.5, 0.75); };
  for (std::size_t j = 0; j < kappas.size(); ++j) {
    if (j == 0) {
      de[j] = clamp((e[1] - e[0]) / (kappas[1] - kappas[0]));
    } else if (j + 1 == kappas.size()) {
      de[j] = clamp((e[j] - e[j - 1]) / (kappas[j] - kappas[j - 1]));
    } else {
      double dl = kappas[j] - kappas[j - 1], dr = kappas[j + 1] - kappas[j];
      double sl = (e[j] - e[j - 1]) / dl, sr = (e[j + 1] - e[j]) / dr;
      de[j] = clamp((dr * sl + dl * sr) / (dl + dr));
    }
  }
  return AuxTable(alpha, std::move(kappas), std::move(e), std::move(de));
}

}  // namespace disbec

#endif  // DISBEC_AUX_INTERVAL_HPP

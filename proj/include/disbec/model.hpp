#ifndef DISBEC_MODEL_HPP
#define DISBEC_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "disbec/errors.hpp"

namespace disbec {

// Sentinel for an infinitely strong scatterer / boundary penalty.
// Code that accepts a strength must branch on is_infinite explicitly.
inline constexpr double kInfiniteStrength =
    std::numeric_limits<double>::infinity();

inline bool is_infinite(double strength) { return std::isinf(strength); }

// Positions of coincident scatterers closer than this are merged.
inline constexpr double kMergeTolerance = 1e-12;

// Physical parameters of one disordered condensate instance plus the
// numerical controls shared by the iterative solvers.
//   gamma: interaction strength, >= 0
//   sigma: scatterer strength, >= 0, may be kInfiniteStrength
//   nu:    mean scatterer density, > 0
struct ModelParams {
  double gamma = 0.0;
  double sigma = kInfiniteStrength;
  double nu = 1.0;
  int grid_points = 1024;
  double tol_energy = 1e-10;
  double tol_root = 1e-8;
  int max_iter = 50000;
};

inline void validate(const ModelParams& p) {
  if (!(p.gamma >= 0.0) || std::isnan(p.gamma)) {
    throw DomainError("gamma must be >= 0");
  }
  if (!(p.sigma >= 0.0)) {
    throw DomainError("sigma must be >= 0 (may be infinite)");
  }
  if (!(p.nu > 0.0) || std::isinf(p.nu)) {
    throw DomainError("nu must be positive and finite");
  }
  if (p.grid_points < 16) {
    throw ResolutionError("grid needs at least 16 interior nodes");
  }
  if (!(p.tol_energy > 0.0) || !(p.tol_root > 0.0) || p.max_iter < 1) {
    throw DomainError("solver tolerances must be positive");
  }
}

// Uniform grid of M interior nodes on (0,1): x_i = i*h, i = 1..M,
// h = 1/(M+1).  The endpoints x=0 and x=1 are not represented; Dirichlet
// values there are implied zeros.
struct Grid {
  int M = 0;
  double h = 0.0;

  double x(int i) const { return (i + 1) * h; }  // i in [0, M)
};

inline Grid build_grid(int M) {
  if (M < 16) throw ResolutionError("grid needs at least 16 interior nodes");
  Grid g;
  g.M = M;
  g.h = 1.0 / (M + 1);
  return g;
}

// Trapezoid rule over [0,1] for values on interior nodes with implied zero
// endpoints; reduces to h * sum.  This is the repo-wide normalization
// convention: every integral and norm uses it, so normalization factors
// cancel between modules.
inline double trapezoid(const Grid& g, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != g.M) {
    throw DimensionError("value array does not match grid");
  }
  double s = 0.0;
  for (double x : v) s += x;
  return g.h * s;
}

// Real-valued function sampled on the interior nodes of a Grid.
struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const Grid& g) : grid(g), values(g.M, 0.0) {}
  GridFunction(const Grid& g, std::vector<double> v)
      : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != g.M) {
      throw DimensionError("value array does not match grid");
    }
  }

  template <typename F>
  static GridFunction sample(const Grid& g, F&& f) {
    GridFunction out(g);
    for (int i = 0; i < g.M; ++i) out.values[i] = f(g.x(i));
    return out;
  }

  // h * sum of values^p (trapezoid with implied zero endpoints).
  double moment(int p) const {
    double s = 0.0;
    for (double v : values) s += std::pow(v, p);
    return grid.h * s;
  }

  double norm2() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return grid.h * s;
  }

  double norm() const { return std::sqrt(norm2()); }

  void scale(double c) {
    for (double& v : values) v *= c;
  }

  // Rescales to unit L2 norm; no-op guard against the zero function.
  void normalize() {
    double n = norm();
    if (!(n > 0.0)) throw DomainError("cannot normalize the zero function");
    scale(1.0 / n);
  }

  // Linear interpolation with zero boundary values.
  double value_at(double x) const {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    double t = x / grid.h;            // node index in [0, M+1]
    int cell = static_cast<int>(t);   // left node of the cell, 0 = boundary
    double frac = t - cell;
    double left = (cell >= 1 && cell <= grid.M) ? values[cell - 1] : 0.0;
    double right = (cell + 1 <= grid.M) ? values[cell] : 0.0;
    return left + frac * (right - left);
  }
};

// Fixed realization of the scatterer positions on (0,1).
//   positions: strictly increasing, strictly inside (0,1)
//   weights:   multiplicity of each scatterer (coincident merges sum here)
//   strength:  common strength sigma, > 0, may be kInfiniteStrength
struct ScattererConfig {
  std::vector<double> positions;
  std::vector<double> weights;
  double strength = kInfiniteStrength;

  int m() const { return static_cast<int>(positions.size()); }

  // Interval lengths l_0..l_m delimited by the scatterers.  The last one is
  // computed as a remainder so the sum is exactly 1 in floating point.
  std::vector<double> gaps() const {
    std::vector<double> g;
    g.reserve(positions.size() + 1);
    double prev = 0.0;
    double used = 0.0;
    for (double z : positions) {
      double len = z - prev;
      g.push_back(len);
      used += len;
      prev = z;
    }
    g.push_back(1.0 - used);
    return g;
  }
};

// Validates, sorts, and merges raw positions into a ScattererConfig.
// Coincident scatterers (within kMergeTolerance) merge into one with summed
// weight; for infinite strength the weight is irrelevant but still tracked.
inline ScattererConfig config_from_positions(std::vector<double> positions,
                                             double strength,
                                             std::vector<double> weights = {}) {
  if (!(strength >= 0.0)) {
    throw DomainError("scatterer strength must be >= 0 (may be infinite)");
  }
  if (weights.empty()) {
    weights.assign(positions.size(), 1.0);
  }
  if (weights.size() != positions.size()) {
    throw DimensionError("weights length must match positions length");
  }
  for (double z : positions) {
    if (!(z > 0.0 && z < 1.0)) {
      throw DomainError("scatterer positions must lie strictly inside (0,1)");
    }
  }
  for (double w : weights) {
    if (!(w > 0.0) || std::isinf(w)) {
      throw DomainError("scatterer weights must be positive and finite");
    }
  }
  std::vector<std::size_t> order(positions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return positions[a] < positions[b];
  });

  ScattererConfig cfg;
  cfg.strength = strength;
  for (std::size_t k : order) {
    double z = positions[k];
    double w = weights[k];
    if (!cfg.positions.empty() && z - cfg.positions.back() <= kMergeTolerance) {
      cfg.weights.back() += w;
    } else {
      cfg.positions.push_back(z);
      cfg.weights.push_back(w);
    }
  }
  return cfg;
}

inline void to_json(nlohmann::json& j, const ScattererConfig& cfg) {
  j = nlohmann::json{{"positions", cfg.positions}};
  if (is_infinite(cfg.strength)) {
    j["strength"] = "inf";
  } else {
    j["strength"] = cfg.strength;
  }
  bool unit = std::all_of(cfg.weights.begin(), cfg.weights.end(),
                          [](double w) { return w == 1.0; });
  if (!unit) j["weights"] = cfg.weights;
}

inline void from_json(const nlohmann::json& j, ScattererConfig& cfg) {
  std::vector<double> positions = j.at("positions").get<std::vector<double>>();
  double strength = 0.0;
  const auto& s = j.at("strength");
  if (s.is_string()) {
    if (s.get<std::string>() != "inf") {
      throw IoError("strength must be a number or \"inf\"");
    }
    strength = kInfiniteStrength;
  } else {
    strength = s.get<double>();
  }
  std::vector<double> weights;
  if (j.contains("weights")) {
    weights = j.at("weights").get<std::vector<double>>();
  }
  cfg = config_from_positions(std::move(positions), strength,
                              std::move(weights));
}

// Mass placed in each interval of a ScattererConfig, with the per-interval
// coupling kappa_j = n_j * l_j * gamma and the interval energy contribution.
struct IntervalOccupation {
  std::vector<double> mass;    // n_j, size m+1
  std::vector<double> kappa;   // n_j * l_j * gamma
  std::vector<double> energy;  // (n_j / l_j^2) e(kappa_j, .)

  double total_mass() const {
    return std::accumulate(mass.begin(), mass.end(), 0.0);
  }
  double total_energy() const {
    return std::accumulate(energy.begin(), energy.end(), 0.0);
  }
};

}  // namespace disbec

#endif  // DISBEC_MODEL_HPP

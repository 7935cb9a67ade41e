#ifndef DISBEC_THERMO_HPP
#define DISBEC_THERMO_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "disbec/aux_interval.hpp"
#include "disbec/errors.hpp"
#include "disbec/model.hpp"
#include "disbec/quadrature.hpp"

namespace disbec {

// Thermodynamic layer: interval statistics under the exponential gap law
// dp_nu(l) = nu exp(-nu l) dl.  Every integral below substitutes t = nu*l,
// which (a) matches the Gauss-Laguerre weight exactly and (b) makes each
// quantity a function of mu/nu^2 and gamma/nu^2 only, so the scaling
// relation e0(gamma, nu) = gamma * e0(1, nu/sqrt(gamma)) holds structurally
// rather than approximately.

enum class Phase { Extended, Transition, FragmentedLocalized, FewIntervals };

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Extended: return "Extended";
    case Phase::Transition: return "Transition";
    case Phase::FragmentedLocalized: return "FragmentedLocalized";
    case Phase::FewIntervals: return "FewIntervals";
  }
  return "?";
}

inline Phase phase_from_name(const std::string& s) {
  if (s == "Extended") return Phase::Extended;
  if (s == "Transition") return Phase::Transition;
  if (s == "FragmentedLocalized") return Phase::FragmentedLocalized;
  if (s == "FewIntervals") return Phase::FewIntervals;
  throw IoError("unknown phase name: " + s);
}

// Classification cutoffs.  The underlying statements are asymptotic; these
// numbers are artifact conventions, kept visible and adjustable.  Raw
// lambda and lambda*nu are always reported so users can re-threshold.
// The extended cutoff is 0.7 because lambda approaches 1 only
// logarithmically in gamma/nu^2 (lambda = 0.758 at gamma = 100 nu^2 and
// does not reach 0.9 until gamma ~ 700 nu^2); 0.7 marks the regime where
// over two thirds of the intervals are occupied.
struct PhaseThresholds {
  double extended_lambda = 0.7;
  double transition_lambda = 0.1;
  double few_intervals_count = 10.0;  // boundary in lambda * nu
  // Sanity window for mean_interval * nu / (1 + ln(1 + nu^2/gamma)).
  double mean_interval_window_lo = 0.1;
  double mean_interval_window_hi = 10.0;
};

struct ThermoSolution {
  double gamma = 0.0;
  double nu = 0.0;
  double mu = 0.0;
  double lambda_frac = 0.0;  // exp(-pi nu / sqrt(mu))
  double e0 = 0.0;
  Phase phase = Phase::Extended;
  double mean_interval = 0.0;
};

inline void to_json(nlohmann::json& j, const ThermoSolution& s) {
  j = nlohmann::json{{"gamma", s.gamma},
                     {"nu", s.nu},
                     {"mu", s.mu},
                     {"lambda", s.lambda_frac},
                     {"e0", s.e0},
                     {"phase", phase_name(s.phase)},
                     {"mean_interval", s.mean_interval}};
}

inline void from_json(const nlohmann::json& j, ThermoSolution& s) {
  j.at("gamma").get_to(s.gamma);
  j.at("nu").get_to(s.nu);
  j.at("mu").get_to(s.mu);
  j.at("lambda").get_to(s.lambda_frac);
  j.at("e0").get_to(s.e0);
  s.phase = phase_from_name(j.at("phase").get<std::string>());
  j.at("mean_interval").get_to(s.mean_interval);
}

// f(x) = 1 for x <= 1, x / (1 + ln x)^2 for x >= 1; continuous at the knee.
inline double f_scaling(double x) {
  if (!(x >= 0.0)) throw DomainError("f_scaling needs x >= 0");
  if (x <= 1.0) return 1.0;
  double d = 1.0 + std::log(x);
  return x / (d * d);
}

// lambda = exp(-pi nu / sqrt(mu)): the fraction of intervals long enough
// to hold any mass (mu l^2 > pi^2 happens with probability lambda).
inline double occupied_fraction(double mu, double nu) {
  if (!(mu > 0.0)) throw DomainError("occupied_fraction needs mu > 0");
  return std::exp(-M_PI * nu / std::sqrt(mu));
}

namespace thermo_detail {

inline void check_alpha(double alpha, const AuxTable& table) {
  bool both_inf = is_infinite(alpha) && is_infinite(table.alpha());
  if (!both_inf && alpha != table.alpha()) {
    throw DomainError("alpha does not match the supplied table");
  }
}

}  // namespace thermo_detail

// Unique minimizer of n * e(n, alpha) - mu * n over n >= 0.  Zero iff
// mu <= e(0, alpha); otherwise the root of the increasing map
// D(n) = e(n) + n e'(n) = mu, bracketed by [0, mu - e(0,alpha)] since
// e(n) >= e(0) + n/2 and e' >= 1/2.
inline double nbar(double mu, double alpha, const AuxTable& table) {
  thermo_detail::check_alpha(alpha, table);
  double e0 = table.e_at(0.0);
  if (mu <= e0) return 0.0;
  double lo = 0.0;
  double hi = (mu - e0) * (1.0 + 1e-12);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    double d = table.e_at(mid) + mid * table.de_at(mid);
    (d < mu ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Legendre transform g(mu, alpha) = inf_n [n e(n, alpha) - mu n] <= 0.
inline double g_legendre(double mu, double alpha, const AuxTable& table) {
  double n = nbar(mu, alpha, table);
  if (n == 0.0) return 0.0;
  return n * table.e_at(n) - mu * n;
}

namespace thermo_detail {

// Integrals over the gap law in t = nu*l.  The occupation threshold
// mu l^2 > pi^2 puts the lower limit at a = pi nu / sqrt(mu); each
// integrand below vanishes there, so the rule never sees the kink.
struct GapLawContext {
  double gamma, nu;
  const AuxTable* table;
  const LaguerreRule* rule;

  double a(double mu) const { return M_PI * nu / std::sqrt(mu); }

  // N(mu) = nu Int dp(l) (l gamma)^-1 nbar(mu l^2)
  double normalization(double mu) const {
    double s = mu / (nu * nu);
    return laguerre_shifted(*rule, a(mu), [&](double t) {
      return (nu * nu / gamma) * nbar(s * t * t, table->alpha(), *table) / t;
    });
  }

  // primal: nu Int dp(l) (gamma l^3)^-1 nbar e(nbar)
  double primal_energy(double mu) const {
    double s = mu / (nu * nu);
    double n4 = nu * nu * nu * nu;
    return laguerre_shifted(*rule, a(mu), [&](double t) {
      double n = nbar(s * t * t, table->alpha(), *table);
      if (n == 0.0) return 0.0;
      return (n4 / gamma) * n * table->e_at(n) / (t * t * t);
    });
  }

  // dual tail: nu Int dp(l) (gamma l^3)^-1 g(mu l^2)
  double dual_tail(double mu) const {
    double s = mu / (nu * nu);
    double n4 = nu * nu * nu * nu;
    return laguerre_shifted(*rule, a(mu), [&](double t) {
      return (n4 / gamma) * g_legendre(s * t * t, table->alpha(), *table) /
             (t * t * t);
    });
  }

  // mean occupied interval length: nu Int dp(l) l n(l), n(l) = nbar/(l gamma)
  double mean_interval(double mu) const {
    double s = mu / (nu * nu);
    return laguerre_shifted(*rule, a(mu), [&](double t) {
      return (nu / gamma) * nbar(s * t * t, table->alpha(), *table);
    });
  }

  // Closed-form proxies using the proven band
  // (2/3)[y - pi^2]+ <= nbar(y) <= [y - pi^2]+ : no table needed, used to
  // pre-bracket mu and to size kappa ranges.
  double normalization_linear_bound(double mu) const {
    double s = mu / (nu * nu);
    return laguerre_shifted(*rule, a(mu), [&](double t) {
      return (nu * nu / gamma) * (s * t * t - M_PI * M_PI) / t;
    });
  }
};

}  // namespace thermo_detail

inline const LaguerreRule& default_gap_rule() {
  static const LaguerreRule rule = gauss_laguerre(64);
  return rule;
}

// Normalization integral N(mu); solve_mu drives it to 1.
inline double interval_normalization(double mu, double gamma, double nu,
                                     const AuxTable& table) {
  thermo_detail::GapLawContext ctx{gamma, nu, &table, &default_gap_rule()};
  return ctx.normalization(mu);
}

// Upper bracket for the chemical potential from the nbar band: at the
// returned mu the true N(mu) is already >= 1.  Table-free.
inline double mu_upper_bracket(double gamma, double nu) {
  if (!(gamma > 0.0) || !(nu > 0.0)) {
    throw DomainError("mu_upper_bracket needs gamma > 0, nu > 0");
  }
  thermo_detail::GapLawContext ctx{gamma, nu, nullptr, &default_gap_rule()};
  double lo = M_PI * M_PI;
  double hi = 10.0 * gamma + 10.0 * nu * nu;
  int grow = 0;
  while ((2.0 / 3.0) * ctx.normalization_linear_bound(hi) < 1.0) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 60) throw BracketError("mu bracket expansion exhausted");
  }
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    ((2.0 / 3.0) * ctx.normalization_linear_bound(mid) < 1.0 ? lo : hi) = mid;
  }
  return hi;
}

// Largest kappa = nbar(mu l^2) the gap-law quadrature can request while
// solving at chemical potentials up to mu_hi.  Sized at the last node of
// the rule, with margin.
inline double required_kappa_max(double gamma, double nu) {
  double mu_hi = mu_upper_bracket(gamma, nu);
  double tmax = default_gap_rule().nodes.back();
  double y = M_PI * M_PI + 2.0 * M_PI * tmax * std::sqrt(mu_hi) / nu +
             mu_hi * tmax * tmax / (nu * nu);
  return 1.05 * (y - M_PI * M_PI);
}

// Builds a hard-wall table sized for (gamma, nu); knot count grows with the
// kappa range so interpolation accuracy stays roughly uniform.
inline AuxTable build_table_for(double gamma, double nu, int M = 1023) {
  double kmax = required_kappa_max(gamma, nu);
  int knots = std::max(48, static_cast<int>(8.0 * std::log10(kmax / 0.05)));
  return build_aux_table(kInfiniteStrength, kmax, knots, M);
}

// Chemical potential from the normalization condition N(mu) = 1.
// N is increasing in mu; starting bracket [e(0,inf), 10 gamma + 10 nu^2]
// with geometric expansion in both directions.  The root sits below
// e(0,inf) whenever nu^2/gamma is large (gaps much longer than the unit
// threshold length carry mass at small mu), so downward expansion is not
// optional.  The upper end is pre-tightened by the table-free certificate
// so bisection never requests kappa beyond what required_kappa_max sized.
inline double solve_mu(double gamma, double nu, const AuxTable& table,
                       double tol_root = 1e-8) {
  if (!(gamma > 0.0) || !(nu > 0.0)) {
    throw DomainError("solve_mu needs gamma > 0, nu > 0");
  }
  thermo_detail::GapLawContext ctx{gamma, nu, &table, &default_gap_rule()};
  double hi = std::min(10.0 * gamma + 10.0 * nu * nu,
                       mu_upper_bracket(gamma, nu));
  double lo = std::min(M_PI * M_PI, hi);
  int grow = 0;
  while (ctx.normalization(lo) > 1.0) {
    hi = lo;
    lo *= 0.5;
    if (++grow > 60) throw BracketError("mu bracket expansion exhausted");
  }
  grow = 0;
  while (ctx.normalization(hi) < 1.0) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 60) throw BracketError("mu bracket expansion exhausted");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (ctx.normalization(mid) < 1.0 ? lo : hi) = mid;
  }
  double mu = 0.5 * (lo + hi);
  if (std::fabs(ctx.normalization(mu) - 1.0) > tol_root) {
    throw ConvergenceError("solve_mu: N(mu) residual above tolerance",
                           std::fabs(ctx.normalization(mu) - 1.0));
  }
  return mu;
}

struct E0Result {
  double e0 = 0.0;      // dual value, the quoted deterministic energy
  double primal = 0.0;  // average per-particle energy at the optimizer
  double dual = 0.0;    // mu + gap-law average of g
  double mu = 0.0;
};

// Deterministic energy with the strong-duality cross-check.  The duality
// gap equals mu * (1 - N(mu)) identically, so the two routes agree to the
// accuracy of the mu root; a mismatch beyond 1e-4 means a broken table or
// quadrature and is refused.
inline E0Result e0_deterministic(double gamma, double nu,
                                 const AuxTable& table) {
  thermo_detail::GapLawContext ctx{gamma, nu, &table, &default_gap_rule()};
  E0Result r;
  r.mu = solve_mu(gamma, nu, table);
  r.primal = ctx.primal_energy(r.mu);
  r.dual = r.mu + ctx.dual_tail(r.mu);
  r.e0 = r.dual;
  double scale = std::max({std::fabs(r.primal), std::fabs(r.dual), 1e-300});
  if (std::fabs(r.primal - r.dual) > 1e-4 * scale) {
    throw ConsistencyError("primal/dual deterministic energies disagree");
  }
  return r;
}

// Mean occupied interval length at the solved chemical potential.
inline double mean_interval_length(double mu, double gamma, double nu,
                                   const AuxTable& table) {
  thermo_detail::GapLawContext ctx{gamma, nu, &table, &default_gap_rule()};
  return ctx.mean_interval(mu);
}

inline ThermoSolution classify_phase(double gamma, double nu,
                                     const AuxTable& table,
                                     const PhaseThresholds& thr = {}) {
  ThermoSolution s;
  s.gamma = gamma;
  s.nu = nu;
  E0Result e = e0_deterministic(gamma, nu, table);
  s.mu = e.mu;
  s.e0 = e.e0;
  s.lambda_frac = occupied_fraction(s.mu, nu);
  s.mean_interval = mean_interval_length(s.mu, gamma, nu, table);

  double lam = s.lambda_frac;
  if (lam >= thr.extended_lambda) {
    s.phase = Phase::Extended;
  } else if (lam >= thr.transition_lambda) {
    s.phase = Phase::Transition;
  } else if (lam * nu >= thr.few_intervals_count) {
    s.phase = Phase::FragmentedLocalized;
  } else {
    s.phase = Phase::FewIntervals;
  }

  double expected = (1.0 + std::log(1.0 + nu * nu / gamma)) / nu;
  double ratio = s.mean_interval / expected;
  if (ratio < thr.mean_interval_window_lo ||
      ratio > thr.mean_interval_window_hi) {
    throw ConsistencyError("mean interval length outside its order window");
  }
  return s;
}

}  // namespace disbec

#endif  // DISBEC_THERMO_HPP

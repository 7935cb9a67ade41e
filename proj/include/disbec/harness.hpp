#ifndef DISBEC_HARNESS_HPP
#define DISBEC_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "disbec/disorder.hpp"
#include "disbec/errors.hpp"
#include "disbec/gp_solver.hpp"
#include "disbec/model.hpp"
#include "disbec/thermo.hpp"

namespace disbec {

// Ensemble orchestration: draws disorder realizations, minimizes the random
// functional on each, and compares against the deterministic energy and the
// interval statistics that drive the convergence argument.  Also the
// phase-diagram sweep and flat-file persistence.
//
// Everything here is a pure function of its configuration: sample i always
// draws from stream base_seed + i, workers write disjoint slots, aggregation
// runs in record order, and files are written with explicit %.17g formatting.
// Any degree of parallelism produces byte-identical artifacts.

// ---------------------------------------------------------------------------
// Asymptotic regime check.  The convergence statement assumes strong, dense
// disorder; at finite scale we require gamma >= 5 nu / (ln nu)^2 and
// sigma >= 5 nu / (1 + ln(1 + nu^2/gamma)).  Violations are reported, never
// enforced: probing outside the regime (the gamma = 0 control) is a
// documented experiment.

struct RegimeCheck {
  double gamma_floor = 0.0;
  double sigma_floor = 0.0;
  bool gamma_ok = true;
  bool sigma_ok = true;

  bool ok() const { return gamma_ok && sigma_ok; }
};

inline RegimeCheck check_regime(double gamma, double sigma, double nu) {
  if (!(nu > 0.0)) throw DomainError("regime check needs nu > 0");
  RegimeCheck r;
  const double ln = std::log(nu);
  r.gamma_floor = ln > 0.0 ? 5.0 * nu / (ln * ln)
                           : std::numeric_limits<double>::infinity();
  r.sigma_floor =
      gamma > 0.0 ? 5.0 * nu / (1.0 + std::log1p(nu * nu / gamma)) : 0.0;
  r.gamma_ok = gamma >= r.gamma_floor;
  r.sigma_ok = sigma >= r.sigma_floor;
  return r;
}

// Default scatterer strength for sweeps: ten times the regime floor, so
// swept cells sit comfortably inside the assumption without being rigid
// walls.  gamma = 0 sends the floor to zero; any strength qualifies there.
inline double default_sigma_rule(double gamma, double nu) {
  if (!(nu > 0.0)) throw DomainError("sigma rule needs nu > 0");
  if (!(gamma > 0.0)) return 0.0;
  return 10.0 * nu / (1.0 + std::log1p(nu * nu / gamma));
}

inline void to_json(nlohmann::json& j, const RegimeCheck& r) {
  j = nlohmann::json{{"gamma_floor", r.gamma_floor},
                     {"sigma_floor", r.sigma_floor},
                     {"gamma_ok", r.gamma_ok},
                     {"sigma_ok", r.sigma_ok}};
}

inline void from_json(const nlohmann::json& j, RegimeCheck& r) {
  j.at("gamma_floor").get_to(r.gamma_floor);
  j.at("sigma_floor").get_to(r.sigma_floor);
  j.at("gamma_ok").get_to(r.gamma_ok);
  j.at("sigma_ok").get_to(r.sigma_ok);
}

// ---------------------------------------------------------------------------
// Per-sample record.  Statistics that are undefined for a sample (ratio when
// e0 = 0, interval sums when fewer than two scatterers) are stored as NaN and
// serialize to JSON null; aggregation skips them.

struct SampleRecord {
  int index = 0;
  std::uint64_t seed = 0;
  int scatterers = 0;
  double e_omega = std::numeric_limits<double>::quiet_NaN();
  double e0 = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double n_statistic = std::numeric_limits<double>::quiet_NaN();
  double e_statistic = std::numeric_limits<double>::quiet_NaN();
  double participation_ratio = std::numeric_limits<double>::quiet_NaN();
  std::string phase;
  bool failed = false;
  std::string error;
};

struct EnsembleAggregates {
  double mean_ratio = std::numeric_limits<double>::quiet_NaN();
  double std_ratio = std::numeric_limits<double>::quiet_NaN();
  double stderr_ratio = std::numeric_limits<double>::quiet_NaN();
  double mean_n = std::numeric_limits<double>::quiet_NaN();
  double std_n = std::numeric_limits<double>::quiet_NaN();
  int ratio_count = 0;
  int n_count = 0;
};

struct EnsembleReport {
  double gamma = 0.0;
  double sigma = 0.0;
  double nu = 0.0;
  int samples = 0;
  int grid_points = 0;
  std::uint64_t base_seed = 0;
  double e0 = 0.0;  // deterministic energy; 0 when gamma = 0
  double mu = 0.0;  // chemical potential behind e0; 0 when gamma = 0
  std::string phase;
  RegimeCheck regime;
  int failures = 0;
  std::vector<SampleRecord> records;
  EnsembleAggregates aggregates;
};

namespace harness_detail {

inline std::pair<double, double> mean_std(const std::vector<double>& x) {
  const auto n = static_cast<double>(x.size());
  if (x.empty()) return {std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN()};
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  if (x.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

inline double json_number(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

}  // namespace harness_detail

// Recomputes the stored aggregates from the records (the report invariant).
// Sums run in record order so the recomputation is bitwise reproducible.
inline EnsembleAggregates aggregate_records(
    const std::vector<SampleRecord>& records) {
  std::vector<double> ratios, ns;
  for (const SampleRecord& r : records) {
    if (r.failed) continue;
    if (std::isfinite(r.ratio)) ratios.push_back(r.ratio);
    if (std::isfinite(r.n_statistic)) ns.push_back(r.n_statistic);
  }
  EnsembleAggregates a;
  auto [mr, sr] = harness_detail::mean_std(ratios);
  a.mean_ratio = mr;
  a.std_ratio = sr;
  a.stderr_ratio = ratios.empty()
                       ? std::numeric_limits<double>::quiet_NaN()
                       : sr / std::sqrt(static_cast<double>(ratios.size()));
  auto [mn, sn] = harness_detail::mean_std(ns);
  a.mean_n = mn;
  a.std_n = sn;
  a.ratio_count = static_cast<int>(ratios.size());
  a.n_count = static_cast<int>(ns.size());
  return a;
}

inline void to_json(nlohmann::json& j, const SampleRecord& r) {
  j = nlohmann::json{{"index", r.index},
                     {"seed", r.seed},
                     {"scatterers", r.scatterers},
                     {"e_omega", r.e_omega},
                     {"e0", r.e0},
                     {"ratio", r.ratio},
                     {"n_statistic", r.n_statistic},
                     {"e_statistic", r.e_statistic},
                     {"participation_ratio", r.participation_ratio},
                     {"phase", r.phase},
                     {"failed", r.failed},
                     {"error", r.error}};
}

inline void from_json(const nlohmann::json& j, SampleRecord& r) {
  using harness_detail::json_number;
  j.at("index").get_to(r.index);
  j.at("seed").get_to(r.seed);
  j.at("scatterers").get_to(r.scatterers);
  r.e_omega = json_number(j, "e_omega");
  r.e0 = json_number(j, "e0");
  r.ratio = json_number(j, "ratio");
  r.n_statistic = json_number(j, "n_statistic");
  r.e_statistic = json_number(j, "e_statistic");
  r.participation_ratio = json_number(j, "participation_ratio");
  j.at("phase").get_to(r.phase);
  j.at("failed").get_to(r.failed);
  j.at("error").get_to(r.error);
}

inline void to_json(nlohmann::json& j, const EnsembleAggregates& a) {
  j = nlohmann::json{{"mean_ratio", a.mean_ratio},
                     {"std_ratio", a.std_ratio},
                     {"stderr_ratio", a.stderr_ratio},
                     {"mean_n", a.mean_n},
                     {"std_n", a.std_n},
                     {"ratio_count", a.ratio_count},
                     {"n_count", a.n_count}};
}

inline void from_json(const nlohmann::json& j, EnsembleAggregates& a) {
  using harness_detail::json_number;
  a.mean_ratio = json_number(j, "mean_ratio");
  a.std_ratio = json_number(j, "std_ratio");
  a.stderr_ratio = json_number(j, "stderr_ratio");
  a.mean_n = json_number(j, "mean_n");
  a.std_n = json_number(j, "std_n");
  j.at("ratio_count").get_to(a.ratio_count);
  j.at("n_count").get_to(a.n_count);
}

inline void to_json(nlohmann::json& j, const EnsembleReport& r) {
  j = nlohmann::json{{"gamma", r.gamma},
                     {"sigma", r.sigma},
                     {"nu", r.nu},
                     {"samples", r.samples},
                     {"grid_points", r.grid_points},
                     {"base_seed", r.base_seed},
                     {"e0", r.e0},
                     {"mu", r.mu},
                     {"phase", r.phase},
                     {"regime", r.regime},
                     {"failures", r.failures},
                     {"records", r.records},
                     {"aggregates", r.aggregates}};
}

inline void from_json(const nlohmann::json& j, EnsembleReport& r) {
  j.at("gamma").get_to(r.gamma);
  j.at("sigma").get_to(r.sigma);
  j.at("nu").get_to(r.nu);
  j.at("samples").get_to(r.samples);
  j.at("grid_points").get_to(r.grid_points);
  j.at("base_seed").get_to(r.base_seed);
  j.at("e0").get_to(r.e0);
  j.at("mu").get_to(r.mu);
  j.at("phase").get_to(r.phase);
  j.at("regime").get_to(r.regime);
  j.at("failures").get_to(r.failures);
  j.at("records").get_to(r.records);
  j.at("aggregates").get_to(r.aggregates);
}

// Worker cap from DISBEC_THREADS; unset, empty, or unparsable means serial.
inline int harness_thread_limit() {
  const char* env = std::getenv("DISBEC_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || v < 1) return 1;
  return static_cast<int>(std::min(v, 256L));
}

// ---------------------------------------------------------------------------
// Ensemble run.  The deterministic side (table, chemical potential, e0,
// phase) is computed once per (gamma, nu); each sample then draws its own
// realization, minimizes the full functional, and records
//   N = sum_{j=1}^{m-1} (l_j gamma)^{-1} nbar(mu l_j^2, inf)
// over interior intervals (the normalization statistic whose mean tends to
// one) and E, the canonical decomposition upper bound evaluated on those
// masses.  Per-sample failures of any kind are recorded, never fatal.

inline EnsembleReport run_ensemble(const ModelParams& params,
                                   const EnsembleSpec& spec) {
  if (spec.samples < 1) throw DomainError("ensemble needs samples >= 1");
  if (!(spec.nu > 0.0)) throw DomainError("ensemble needs nu > 0");
  ModelParams p = params;
  p.nu = spec.nu;  // the ensemble density is authoritative
  validate(p);

  EnsembleReport report;
  report.gamma = p.gamma;
  report.sigma = p.sigma;
  report.nu = p.nu;
  report.samples = spec.samples;
  report.grid_points = p.grid_points;
  report.base_seed = spec.base_seed;
  report.regime = check_regime(p.gamma, p.sigma, p.nu);

  const bool interacting = p.gamma > 0.0;
  DecompositionContext ctx =
      interacting
          ? make_decomposition_context(p)
          : DecompositionContext{
                0.0, build_aux_table(kInfiniteStrength, 1.0, 48, 511), {}};
  if (interacting) {
    ThermoSolution ts = classify_phase(p.gamma, p.nu, ctx.inf_table);
    report.e0 = ts.e0;
    report.mu = ts.mu;
    report.phase = phase_name(ts.phase);
  } else {
    // No interaction: the deterministic limit vanishes and the occupied
    // fraction collapses, which is the few-intervals corner of the diagram.
    report.e0 = 0.0;
    report.mu = 0.0;
    report.phase = phase_name(Phase::FewIntervals);
  }

  auto run_one = [&](int i) {
    SampleRecord rec;
    rec.index = i;
    rec.seed = spec.seed_for(i);
    rec.phase = report.phase;
    try {
      ScattererConfig cfg = sample_config(p.nu, rec.seed, p.sigma);
      rec.scatterers = cfg.m();
      GPResult g = minimize_gp(cfg, p, ctx);
      rec.e_omega = g.energy;
      rec.participation_ratio = g.participation_ratio;
      rec.e0 = report.e0;
      if (report.e0 > 0.0) rec.ratio = g.energy / report.e0;
      if (p.gamma > 0.0 && cfg.m() >= 2) {
        const std::vector<double> gaps = cfg.gaps();
        double n_sum = 0.0;
        for (std::size_t jdx = 1; jdx + 1 < gaps.size(); ++jdx) {
          const double l = gaps[jdx];
          n_sum += nbar(report.mu * l * l, kInfiniteStrength, ctx.inf_table) /
                   (l * p.gamma);
        }
        rec.n_statistic = n_sum;
        try {
          rec.e_statistic = decomposition_upper(cfg, p, ctx.inf_table,
                                                report.mu);
        } catch (const DegenerateConfigError&) {
          // no interior interval occupied: the statistic has no value
        }
      }
    } catch (const std::exception& err) {
      rec.failed = true;
      rec.error = err.what();
    } catch (...) {
      rec.failed = true;
      rec.error = "unknown failure";
    }
    return rec;
  };

  report.records.resize(static_cast<std::size_t>(spec.samples));
  const int workers = std::min(harness_thread_limit(), spec.samples);
  if (workers <= 1) {
    for (int i = 0; i < spec.samples; ++i) {
      report.records[static_cast<std::size_t>(i)] = run_one(i);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < spec.samples;
             i = next.fetch_add(1)) {
          report.records[static_cast<std::size_t>(i)] = run_one(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  for (const SampleRecord& rec : report.records) {
    if (rec.failed) ++report.failures;
  }
  report.aggregates = aggregate_records(report.records);
  return report;
}

// ---------------------------------------------------------------------------
// Phase-diagram sweep.  Every cell gets the deterministic classification;
// cells with nu below the cap additionally get one disorder sample's
// participation ratio (grids fine enough for much larger nu are not desk
// scale).  Cell errors propagate: a sweep is only as good as its worst cell.

struct PhaseCell {
  ThermoSolution thermo;
  double sigma = 0.0;  // strength the sample used (rule value)
  std::uint64_t seed = 0;
  double participation_ratio = std::numeric_limits<double>::quiet_NaN();
  bool has_sample = false;
};

struct PhaseDiagram {
  std::vector<double> gammas;
  std::vector<double> nus;
  std::vector<PhaseCell> cells;  // nu-major: cells[i_nu * gammas + i_gamma]

  const PhaseCell& at(std::size_t i_gamma, std::size_t i_nu) const {
    return cells[i_nu * gammas.size() + i_gamma];
  }
};

struct PhaseDiagramOptions {
  double pr_nu_cap = 100.0;    // sample PR only for nu at or below this
  std::uint64_t base_seed = 1; // cell k samples with seed base_seed + k
  int grid_points = 2047;      // solver grid for the PR samples
};

inline std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw DomainError("log spacing needs 0 < lo < hi");
  }
  if (n < 2) throw DomainError("log spacing needs at least two points");
  std::vector<double> x(static_cast<std::size_t>(n));
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  }
  x.back() = hi;
  return x;
}

inline PhaseDiagram phase_diagram(
    const std::vector<double>& gamma_grid, const std::vector<double>& nu_grid,
    const std::function<double(double, double)>& sigma_rule =
        default_sigma_rule,
    const PhaseDiagramOptions& opt = {}) {
  auto check_grid = [](const std::vector<double>& g, const char* name) {
    if (g.empty()) throw DomainError(std::string(name) + " grid is empty");
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(g[i] > 0.0)) {
        throw DomainError(std::string(name) + " grid must be positive");
      }
      if (i > 0 && !(g[i] > g[i - 1])) {
        throw DomainError(std::string(name) + " grid must be increasing");
      }
    }
  };
  check_grid(gamma_grid, "gamma");
  check_grid(nu_grid, "nu");

  PhaseDiagram out;
  out.gammas = gamma_grid;
  out.nus = nu_grid;
  out.cells.reserve(gamma_grid.size() * nu_grid.size());
  std::uint64_t k = 0;
  for (double nu : nu_grid) {
    for (double gamma : gamma_grid) {
      AuxTable table = build_table_for(gamma, nu);
      PhaseCell cell;
      cell.thermo = classify_phase(gamma, nu, table);
      cell.sigma = sigma_rule(gamma, nu);
      cell.seed = opt.base_seed + k;
      if (nu <= opt.pr_nu_cap) {
        ModelParams p;
        p.gamma = gamma;
        p.sigma = cell.sigma;
        p.nu = nu;
        p.grid_points = opt.grid_points;
        ScattererConfig cfg = sample_config(nu, cell.seed, cell.sigma);
        DecompositionContext ctx{cell.thermo.mu, std::move(table), {}};
        GPResult g = minimize_gp(cfg, p, ctx);
        cell.participation_ratio = g.participation_ratio;
        cell.has_sample = true;
      }
      out.cells.push_back(std::move(cell));
      ++k;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence.  All numbers go through %.17g (round-trip exact, locale
// independent); headers are frozen constants so the documented schema and
// the emitted bytes cannot drift apart.

inline constexpr const char* kEnsembleCsvHeader =
    "mode,nu,gamma,sigma,samples,failures,e0,mean_ratio,std_ratio,"
    "stderr_ratio,mean_n,std_n";

inline constexpr const char* kPhaseCsvHeader = "gamma,nu,mu,lambda,e0,phase";

namespace harness_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Compact parameter spelling for file names: %g digits with '.' -> 'p',
// no '+', so 0.5 -> 0p5 and 1e+06 -> 1e06.
inline std::string tag(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  std::string s = buf;
  std::replace(s.begin(), s.end(), '.', 'p');
  s.erase(std::remove(s.begin(), s.end(), '+'), s.end());
  return s;
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << body;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace harness_detail

inline std::string ensemble_stem(const EnsembleReport& r) {
  using harness_detail::tag;
  return "ensemble_nu" + tag(r.nu) + "_gamma" + tag(r.gamma) + "_sigma" +
         tag(r.sigma) + "_seed" + std::to_string(r.base_seed);
}

inline std::string ensemble_csv(const EnsembleReport& r) {
  using harness_detail::fmt;
  std::string s = std::string(kEnsembleCsvHeader) + "\n";
  s += "ensemble," + fmt(r.nu) + "," + fmt(r.gamma) + "," + fmt(r.sigma) +
       "," + std::to_string(r.samples) + "," + std::to_string(r.failures) +
       "," + fmt(r.e0) + "," + fmt(r.aggregates.mean_ratio) + "," +
       fmt(r.aggregates.std_ratio) + "," + fmt(r.aggregates.stderr_ratio) +
       "," + fmt(r.aggregates.mean_n) + "," + fmt(r.aggregates.std_n) + "\n";
  return s;
}

inline std::string phase_diagram_csv(const PhaseDiagram& d) {
  using harness_detail::fmt;
  std::string s = std::string(kPhaseCsvHeader) + "\n";
  for (const PhaseCell& c : d.cells) {
    s += fmt(c.thermo.gamma) + "," + fmt(c.thermo.nu) + "," +
         fmt(c.thermo.mu) + "," + fmt(c.thermo.lambda_frac) + "," +
         fmt(c.thermo.e0) + "," + phase_name(c.thermo.phase) + "\n";
  }
  return s;
}

inline std::string pr_map_csv(const PhaseDiagram& d) {
  using harness_detail::fmt;
  std::string s = "gamma,nu,sigma,seed,participation_ratio\n";
  for (const PhaseCell& c : d.cells) {
    if (!c.has_sample) continue;
    s += fmt(c.thermo.gamma) + "," + fmt(c.thermo.nu) + "," + fmt(c.sigma) +
         "," + std::to_string(c.seed) + "," + fmt(c.participation_ratio) +
         "\n";
  }
  return s;
}

// Two-column plain-text plot data; one "x y" row per line.
inline std::string plot_data(const std::vector<double>& x,
                             const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw DimensionError("plot columns differ in length");
  }
  using harness_detail::fmt;
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += fmt(x[i]) + " " + fmt(y[i]) + "\n";
  }
  return s;
}

// Writes the full artifact set for a sweep of ensemble runs: per-run JSON
// (all records) and aggregate CSV, plus sweep-level ratio and spread trends
// against nu.  Returns the written paths in emission order.
inline std::vector<std::string> emit_ensemble_outputs(
    const std::vector<EnsembleReport>& reports,
    const std::filesystem::path& out_dir) {
  if (reports.empty()) throw DomainError("no reports to emit");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> paths;
  for (const EnsembleReport& r : reports) {
    const std::string stem = ensemble_stem(r);
    fs::path pj = out_dir / (stem + ".json");
    harness_detail::write_file(pj, nlohmann::json(r).dump(2) + "\n");
    paths.push_back(pj.string());
    fs::path pc = out_dir / (stem + "_aggregates.csv");
    harness_detail::write_file(pc, ensemble_csv(r));
    paths.push_back(pc.string());
  }
  std::vector<double> nus, means, stds;
  for (const EnsembleReport& r : reports) {
    nus.push_back(r.nu);
    means.push_back(r.aggregates.mean_ratio);
    stds.push_back(r.aggregates.std_ratio);
  }
  const std::string prefix =
      "ensemble_seed" + std::to_string(reports.front().base_seed) + "_";
  fs::path pr = out_dir / (prefix + "ratio_vs_nu.dat");
  harness_detail::write_file(pr, plot_data(nus, means));
  paths.push_back(pr.string());
  fs::path ps = out_dir / (prefix + "std_vs_nu.dat");
  harness_detail::write_file(ps, plot_data(nus, stds));
  paths.push_back(ps.string());
  return paths;
}

// Phase-diagram artifacts: the labeled CSV map, the sampled participation
// ratios, and one lambda-vs-gamma contour file per nu.
inline std::vector<std::string> emit_phase_outputs(
    const PhaseDiagram& d, const std::filesystem::path& out_dir,
    std::uint64_t base_seed) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string prefix =
      "phase_diagram_seed" + std::to_string(base_seed) + "_";
  std::vector<std::string> paths;
  fs::path pm = out_dir / (prefix + "map.csv");
  harness_detail::write_file(pm, phase_diagram_csv(d));
  paths.push_back(pm.string());
  fs::path pp = out_dir / (prefix + "pr_map.csv");
  harness_detail::write_file(pp, pr_map_csv(d));
  paths.push_back(pp.string());
  for (std::size_t i_nu = 0; i_nu < d.nus.size(); ++i_nu) {
    std::vector<double> lam(d.gammas.size());
    for (std::size_t i_g = 0; i_g < d.gammas.size(); ++i_g) {
      lam[i_g] = d.at(i_g, i_nu).thermo.lambda_frac;
    }
    fs::path pl = out_dir / (prefix + "lambda_vs_gamma_nu" +
                             harness_detail::tag(d.nus[i_nu]) + ".dat");
    harness_detail::write_file(pl, plot_data(d.gammas, lam));
    paths.push_back(pl.string());
  }
  return paths;
}

// ---------------------------------------------------------------------------
// Experiment configuration, the single JSON-serializable object the CLI
// consumes.  Sweeps are expressed as parallel per-run arrays; empty arrays
// mean a single run at the scalar parameters.

enum class ExperimentMode {
  Aux,
  Thermo,
  Gp,
  Ensemble,
  Gap,
  Depletion,
  PoissonStats,
  PhaseDiagram,
};

inline std::string mode_name(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::Aux: return "aux";
    case ExperimentMode::Thermo: return "thermo";
    case ExperimentMode::Gp: return "gp";
    case ExperimentMode::Ensemble: return "ensemble";
    case ExperimentMode::Gap: return "gap";
    case ExperimentMode::Depletion: return "depletion";
    case ExperimentMode::PoissonStats: return "poisson-stats";
    case ExperimentMode::PhaseDiagram: return "phase-diagram";
  }
  throw DomainError("unknown experiment mode");
}

inline ExperimentMode mode_from_name(const std::string& s) {
  for (ExperimentMode m :
       {ExperimentMode::Aux, ExperimentMode::Thermo, ExperimentMode::Gp,
        ExperimentMode::Ensemble, ExperimentMode::Gap,
        ExperimentMode::Depletion, ExperimentMode::PoissonStats,
        ExperimentMode::PhaseDiagram}) {
    if (mode_name(m) == s) return m;
  }
  throw IoError("unknown experiment mode: " + s);
}

inline void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"gamma", p.gamma},
                     {"nu", p.nu},
                     {"grid_points", p.grid_points},
                     {"tol_energy", p.tol_energy},
                     {"tol_root", p.tol_root},
                     {"max_iter", p.max_iter}};
  if (is_infinite(p.sigma)) {
    j["sigma"] = "inf";
  } else {
    j["sigma"] = p.sigma;
  }
}

inline void from_json(const nlohmann::json& j, ModelParams& p) {
  p = ModelParams{};
  if (j.contains("gamma")) j.at("gamma").get_to(p.gamma);
  if (j.contains("nu")) j.at("nu").get_to(p.nu);
  if (j.contains("grid_points")) j.at("grid_points").get_to(p.grid_points);
  if (j.contains("tol_energy")) j.at("tol_energy").get_to(p.tol_energy);
  if (j.contains("tol_root")) j.at("tol_root").get_to(p.tol_root);
  if (j.contains("max_iter")) j.at("max_iter").get_to(p.max_iter);
  if (j.contains("sigma")) {
    const auto& s = j.at("sigma");
    if (s.is_string()) {
      if (s.get<std::string>() != "inf") {
        throw IoError("sigma must be a number or \"inf\"");
      }
      p.sigma = kInfiniteStrength;
    } else {
      p.sigma = s.get<double>();
    }
  }
}

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::Ensemble;
  ModelParams params;
  EnsembleSpec ensemble;
  std::string output_dir = ".";
  std::string format = "json";
  // Optional sweep: run k uses nu_values[k] with the matching override
  // arrays (all the same length when present).
  std::vector<double> nu_values;
  std::vector<double> gamma_values;
  std::vector<double> sigma_values;
  std::vector<int> grid_values;
};

inline void validate(const ExperimentConfig& c) {
  if (c.format != "json" && c.format != "csv") {
    throw IoError("format must be json or csv");
  }
  if (c.output_dir.empty()) throw IoError("output_dir must not be empty");
  const std::size_t n = c.nu_values.size();
  auto check = [n](std::size_t got, const char* name) {
    if (got != 0 && got != n) {
      throw IoError(std::string(name) +
                    " must be empty or match nu_values in length");
    }
  };
  check(c.gamma_values.size(), "gamma_values");
  check(c.sigma_values.size(), "sigma_values");
  check(c.grid_values.size(), "grid_values");
}

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"mode", mode_name(c.mode)},
                     {"params", c.params},
                     {"ensemble", c.ensemble},
                     {"output_dir", c.output_dir},
                     {"format", c.format}};
  if (!c.nu_values.empty()) j["nu_values"] = c.nu_values;
  if (!c.gamma_values.empty()) j["gamma_values"] = c.gamma_values;
  if (!c.sigma_values.empty()) j["sigma_values"] = c.sigma_values;
  if (!c.grid_values.empty()) j["grid_values"] = c.grid_values;
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  c = ExperimentConfig{};
  if (j.contains("mode")) c.mode = mode_from_name(j.at("mode").get<std::string>());
  if (j.contains("params")) j.at("params").get_to(c.params);
  if (j.contains("ensemble")) j.at("ensemble").get_to(c.ensemble);
  if (j.contains("output_dir")) j.at("output_dir").get_to(c.output_dir);
  if (j.contains("format")) j.at("format").get_to(c.format);
  if (j.contains("nu_values")) j.at("nu_values").get_to(c.nu_values);
  if (j.contains("gamma_values")) j.at("gamma_values").get_to(c.gamma_values);
  if (j.contains("sigma_values")) j.at("sigma_values").get_to(c.sigma_values);
  if (j.contains("grid_values")) j.at("grid_values").get_to(c.grid_values);
  validate(c);
}

inline EnsembleReport run_ensemble(const ExperimentConfig& config) {
  validate(config);
  return run_ensemble(config.params, config.ensemble);
}

inline std::vector<std::string> emit_outputs(const EnsembleReport& report,
                                             const ExperimentConfig& config) {
  validate(config);
  return emit_ensemble_outputs({report}, config.output_dir);
}

// Sweep: one ensemble per nu_values entry, overrides applied positionally.
// A config without nu_values is a single-run sweep.
inline std::vector<EnsembleReport> run_sweep(const ExperimentConfig& config) {
  validate(config);
  if (config.nu_values.empty()) return {run_ensemble(config)};
  std::vector<EnsembleReport> reports;
  reports.reserve(config.nu_values.size());
  for (std::size_t k = 0; k < config.nu_values.size(); ++k) {
    ModelParams p = config.params;
    EnsembleSpec spec = config.ensemble;
    spec.nu = config.nu_values[k];
    if (!config.gamma_values.empty()) p.gamma = config.gamma_values[k];
    if (!config.sigma_values.empty()) p.sigma = config.sigma_values[k];
    if (!config.grid_values.empty()) p.grid_points = config.grid_values[k];
    reports.push_back(run_ensemble(p, spec));
  }
  return reports;
}

}  // namespace disbec

#endif  // DISBEC_HARNESS_HPP

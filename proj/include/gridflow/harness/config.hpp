#pragma once

// Experiment configuration: a flat JSON object whose keys mirror the CLI
// flags. Unset values fall back to per-experiment defaults when resolved.

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridflow/harness/complexity.hpp"
#include "gridflow/harness/convergence.hpp"
#include "gridflow/harness/evolve.hpp"

namespace gridflow {

enum class ExperimentKind { converge, complexity, evolve_thin_film, evolve_spfc };

inline ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "converge") return ExperimentKind::converge;
  if (s == "complexity") return ExperimentKind::complexity;
  if (s == "evolve-thin-film") return ExperimentKind::evolve_thin_film;
  if (s == "evolve-spfc") return ExperimentKind::evolve_spfc;
  throw InvalidParameter("unknown experiment kind '" + s + "'");
}

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::converge: return "converge";
    case ExperimentKind::complexity: return "complexity";
    case ExperimentKind::evolve_thin_film: return "evolve-thin-film";
    case ExperimentKind::evolve_spfc: return "evolve-spfc";
  }
  return "?";
}

struct ExperimentConfig {
  std::optional<ExperimentKind> kind;
  // Scalars; the complexity study reads them as one-element sweeps.
  std::vector<int> n;
  std::vector<double> eps, s, p;
  std::optional<double> length, tmax, tol, gamma0, gamma1, amplitude, bump, sigma;
  std::optional<int> max_iter;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::vector<double> snapshot_times;
  std::optional<std::pair<double, double>> slope_window;
  std::string problem = "p4";  ///< converge: p4 or p6
  std::vector<int> levels{16, 32, 64};
  std::string initial;  ///< random, nucleation or sinusoidal
  std::vector<NucleationSite> sites;
};

namespace detail {

template <class T>
std::vector<T> scalar_or_list(const nlohmann::json& v, const std::string& key) {
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const nlohmann::json::exception&) {
    throw InvalidParameter("config key '" + key + "' has the wrong type");
  }
}

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidParameter("config key '" + key + "' has the wrong type");
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidParameter("config must be a JSON object");
  ExperimentConfig c;
  using detail::get_as;
  for (const auto& [key, v] : j.items()) {
    if (key == "kind") c.kind = parse_experiment_kind(get_as<std::string>(v, key));
    else if (key == "n") c.n = detail::scalar_or_list<int>(v, key);
    else if (key == "eps") c.eps = detail::scalar_or_list<double>(v, key);
    else if (key == "s") c.s = detail::scalar_or_list<double>(v, key);
    else if (key == "p") c.p = detail::scalar_or_list<double>(v, key);
    else if (key == "L") c.length = get_as<double>(v, key);
    else if (key == "tmax") c.tmax = get_as<double>(v, key);
    else if (key == "tol") c.tol = get_as<double>(v, key);
    else if (key == "gamma0") c.gamma0 = get_as<double>(v, key);
    else if (key == "gamma1") c.gamma1 = get_as<double>(v, key);
    else if (key == "amplitude") c.amplitude = get_as<double>(v, key);
    else if (key == "bump") c.bump = get_as<double>(v, key);
    else if (key == "sigma") c.sigma = get_as<double>(v, key);
    else if (key == "max_iter") c.max_iter = get_as<int>(v, key);
    else if (key == "seed") c.seed = get_as<std::uint64_t>(v, key);
    else if (key == "out") c.output_dir = get_as<std::string>(v, key);
    else if (key == "snapshot_times") c.snapshot_times = get_as<std::vector<double>>(v, key);
    else if (key == "slope_window") {
      const auto w = get_as<std::vector<double>>(v, key);
      if (w.size() != 2 || !(w[0] < w[1])) throw InvalidParameter("slope_window must be [lo, hi]");
      c.slope_window = std::pair{w[0], w[1]};
    } else if (key == "problem") c.problem = get_as<std::string>(v, key);
    else if (key == "levels") c.levels = get_as<std::vector<int>>(v, key);
    else if (key == "initial") c.initial = get_as<std::string>(v, key);
    else if (key == "sites") {
      for (const auto& xy : get_as<std::vector<std::vector<double>>>(v, key)) {
        if (xy.size() != 2) throw InvalidParameter("each site must be [x, y]");
        c.sites.push_back({xy[0], xy[1]});
      }
    } else {
      throw InvalidParameter("unknown config key '" + key + "'");
    }
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidParameter("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

// ---- resolution into experiment settings -----------------------------------

namespace detail {

template <class T>
T single(const std::vector<T>& v, T fallback, const char* key) {
  if (v.empty()) return fallback;
  if (v.size() != 1) throw InvalidParameter(std::string("'") + key + "' takes a single value here");
  return v.front();
}

inline PsdConfig solver_config(const ExperimentConfig& c, int default_max_iter) {
  PsdConfig cfg;
  if (c.tol) cfg.tol_rel = *c.tol;
  cfg.max_iter = c.max_iter.value_or(default_max_iter);
  cfg.validate();
  return cfg;
}

}  // namespace detail

inline ConvergenceSettings convergence_settings(const ExperimentConfig& c) {
  ConvergenceSettings cs;
  cs.length = c.length.value_or(cs.length);
  cs.eps = detail::single(c.eps, cs.eps, "eps");
  cs.final_time = c.tmax.value_or(cs.final_time);
  cs.solver = detail::solver_config(c, cs.solver.max_iter);
  if (!(cs.length > 0.0 && cs.final_time > 0.0))
    throw InvalidParameter("L and tmax must be positive");
  return cs;
}

struct ComplexitySweep {
  std::vector<int> n{128};
  std::vector<double> eps{0.03}, s{0.01}, p{4.0};
  double gamma_tol = 1e-8;
  int max_iter = 2000;
};

inline ComplexitySweep complexity_sweep(const ExperimentConfig& c) {
  ComplexitySweep sw;
  if (!c.n.empty()) sw.n = c.n;
  if (!c.eps.empty()) sw.eps = c.eps;
  if (!c.s.empty()) sw.s = c.s;
  if (!c.p.empty()) sw.p = c.p;
  sw.gamma_tol = c.tol.value_or(sw.gamma_tol);
  sw.max_iter = c.max_iter.value_or(sw.max_iter);
  if (!(sw.gamma_tol > 0.0) || sw.max_iter < 1)
    throw InvalidParameter("complexity tolerance and max_iter must be positive");
  return sw;
}

inline EvolveSettings evolve_settings(const ExperimentConfig& c, ExperimentKind kind) {
  EvolveSettings es;
  const bool thin = kind == ExperimentKind::evolve_thin_film;
  if (!thin && kind != ExperimentKind::evolve_spfc)
    throw InvalidParameter("not an evolution experiment");
  es.model = thin ? ModelKind::thin_film : ModelKind::spfc;
  es.n = detail::single(c.n, 128, "n");
  es.length = c.length.value_or(thin ? 12.8 : 100.0);
  es.tmax = c.tmax.value_or(10.0);
  if (thin) {
    es.thin.p = detail::single(c.p, 4.0, "p");
    es.thin.eps = detail::single(c.eps, 0.03, "eps");
    es.thin.s = detail::single(c.s, 0.01, "s");
    es.thin.validate();
  } else {
    if (!c.p.empty() && detail::single(c.p, 4.0, "p") != 4.0)
      throw InvalidParameter("the SPFC model has p = 4");
    es.spfc.eps = detail::single(c.eps, 1.0, "eps");
    es.spfc.s = detail::single(c.s, 0.01, "s");
    es.spfc.gamma0 = c.gamma0.value_or(0.5);
    es.spfc.gamma1 = c.gamma1.value_or(2.0);
    es.spfc.validate();
  }
  es.seed = c.seed;
  es.amplitude = c.amplitude.value_or(es.amplitude);
  es.bump = c.bump.value_or(es.bump);
  es.sigma = c.sigma.value_or(es.sigma);
  es.sites = c.sites;
  const std::string init = c.initial.empty() ? (c.sites.empty() ? "random" : "nucleation")
                                             : c.initial;
  if (init == "random") es.initial = InitialKind::random;
  else if (init == "nucleation") es.initial = InitialKind::nucleation;
  else if (init == "sinusoidal") es.initial = InitialKind::sinusoidal;
  else throw InvalidParameter("unknown initial data '" + init + "'");
  es.snapshot_times = c.snapshot_times;
  es.window = c.slope_window;
  es.solver = detail::solver_config(c, 1000);
  es.output_dir = c.output_dir;
  if (!(es.tmax > 0.0 && es.length > 0.0)) throw InvalidParameter("L and tmax must be positive");
  return es;
}

}  // namespace gridflow

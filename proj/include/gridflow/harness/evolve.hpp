#pragma once

// Long-time evolution driver: per-step records, field snapshots and
// power-law fits of roughness and energy.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridflow/field_io.hpp"
#include "gridflow/harness/output.hpp"
#include "gridflow/models.hpp"

namespace gridflow {

enum class ModelKind { thin_film, spfc };
enum class InitialKind { random, nucleation, sinusoidal };

struct EvolveSettings {
  ModelKind model = ModelKind::thin_film;
  int n = 128;
  double length = 12.8;
  ThinFilmParams thin{4.0, 0.03, 0.01};
  SpfcParams spfc{};
  double tmax = 1.0;
  std::uint64_t seed = 0;
  InitialKind initial = InitialKind::random;
  double amplitude = 0.05;
  std::vector<NucleationSite> sites;
  double bump = 0.3;
  double sigma = 2.0;
  std::vector<double> snapshot_times;
  std::optional<std::pair<double, double>> window;  ///< default [max(1, T/100), T]
  PsdConfig solver{};
  std::string output_dir;  ///< empty: keep results in memory only

  double step() const { return model == ModelKind::thin_film ? thin.s : spfc.s; }
  int steps() const { return static_cast<int>(std::lround(tmax / step())); }
  std::pair<double, double> fit_window() const {
    return window.value_or(std::pair{std::max(1.0, tmax / 100.0), tmax});
  }
};

struct EvolveResult {
  std::vector<EvolutionRecord> records;
  std::vector<double> mean_history;  ///< mean(u^k)
  /// SPFC only: |mean(w^k) - (s g0 mean(u^k) - mean(f^k))| per step.
  std::vector<double> w_mean_defect;
  SlopeFit roughness_fit;
  SlopeFit energy_fit;
  double energy_reference = 0.0;  ///< energies are fitted as E - energy_reference
  std::pair<double, double> window;
  std::optional<CellField> final_u;
};

inline CellField evolve_initial(const EvolveSettings& es, const GridSpec& grid) {
  switch (es.initial) {
    case InitialKind::sinusoidal: return initial_sinusoidal(grid);
    case InitialKind::nucleation:
      return initial_nucleation(grid, es.seed, es.sites, es.amplitude, es.bump, es.sigma);
    case InitialKind::random: break;
  }
  return initial_random(grid, es.seed, es.amplitude);
}

namespace detail {

inline std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%08d.field", step);
  return buf;
}

inline nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace detail

/// Runs the configured model to tmax. With an output directory, writes
/// timeseries.csv, snapshots and slopes.json there. A solver failure flushes
/// the partial CSV before SolverFailure propagates.
inline EvolveResult evolve(const EvolveSettings& es) {
  if (es.model == ModelKind::thin_film)
    es.thin.validate();
  else
    es.spfc.validate();
  if (!(es.tmax > 0.0)) throw InvalidParameter("tmax must be positive");
  es.solver.validate();

  const GridSpec grid(es.n, es.length);
  SpectralWorkspace ws(grid);
  const double s = es.step();
  const int steps = es.steps();
  PsdConfig cfg = es.solver;
  cfg.record_energy = false;

  std::ofstream csv;
  const bool write = !es.output_dir.empty();
  std::filesystem::path dir(es.output_dir);
  if (write) {
    std::filesystem::create_directories(dir);
    csv = open_output((dir / "timeseries.csv").string());
    write_timeseries_header(csv);
  }

  auto energy_of = [&](const CellField& u) {
    return es.model == ModelKind::thin_film ? physical_energy(es.thin, u)
                                            : physical_energy(es.spfc, u);
  };

  EvolveResult res;
  res.window = es.fit_window();
  res.energy_reference =
      es.model == ModelKind::thin_film ? thin_film_energy_floor(es.thin, grid) : 0.0;
  CellField u = evolve_initial(es, grid);

  std::vector<double> snaps = es.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  auto maybe_snapshot = [&](int k, double t) {
    while (next_snap < snaps.size() && t >= snaps[next_snap] - 0.5 * s) {
      if (write) save_field((dir / detail::snapshot_name(k)).string(), u, t);
      ++next_snap;
    }
  };

  auto record = [&](const EvolutionRecord& r) {
    res.records.push_back(r);
    res.mean_history.push_back(mean(u));
    if (write) write_timeseries_row(csv, r);
  };

  record({0, 0.0, energy_of(u), roughness(u), 0, 0.0});
  maybe_snapshot(0, 0.0);

  for (int k = 1; k <= steps; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    PsdReport rep;
    try {
      if (es.model == ModelKind::thin_film) {
        auto st = thin_film_step(u, es.thin, ws, cfg);
        rep = std::move(st.report);
        u = std::move(st.u);
      } else {
        auto st = spfc_step(u, es.spfc, ws, cfg);
        rep = std::move(st.report);
        res.w_mean_defect.push_back(std::abs(
            mean(st.w) - (es.spfc.s * es.spfc.gamma0 * mean(st.u) - mean(st.f))));
        u = std::move(st.u);
      }
    } catch (const Error& e) {
      if (write) csv.flush();
      throw SolverFailure("step " + std::to_string(k) + ": " + e.what());
    }
    if (!rep.converged) {
      if (write) csv.flush();
      throw SolverFailure("PSD did not converge within " + std::to_string(es.solver.max_iter) +
                          " iterations at step " + std::to_string(k));
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const double t = k * s;
    record({k, t, energy_of(u), roughness(u), rep.iterations, ms});
    maybe_snapshot(k, t);
  }

  std::vector<double> ts, ws_, es_;
  for (const auto& r : res.records) {
    ts.push_back(r.time);
    ws_.push_back(r.roughness);
    es_.push_back(r.energy - res.energy_reference);
  }
  res.roughness_fit = fit_loglog_slope(ts, ws_, res.window.first, res.window.second);
  res.energy_fit = fit_loglog_slope(ts, es_, res.window.first, res.window.second);
  res.final_u = u;

  if (write) {
    csv.flush();
    nlohmann::json j;
    j["model"] = es.model == ModelKind::thin_film ? "thin-film" : "spfc";
    j["window"] = {res.window.first, res.window.second};
    j["roughness_slope"] = detail::number_or_null(res.roughness_fit.slope);
    j["energy_slope"] = detail::number_or_null(res.energy_fit.slope);
    j["energy_reference"] = res.energy_reference;
    j["roughness_samples"] = res.roughness_fit.samples;
    j["energy_samples"] = res.energy_fit.samples;
    j["steps"] = steps;
    auto os = open_output((dir / "slopes.json").string());
    os << j.dump(2) << '\n';
  }
  return res;
}

}  // namespace gridflow

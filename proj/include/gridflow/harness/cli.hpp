#pragma once

#include <filesystem>
#include <initializer_list>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "gridflow/harness/config.hpp"
#include "gridflow/harness/output.hpp"

#ifndef GRIDFLOW_VERSION
#define GRIDFLOW_VERSION "0.0.0"
#endif

namespace gridflow {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2 };

namespace detail {

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::size_t stop = comma == std::string_view::npos ? s.size() : comma;
    out.emplace_back(s.substr(start, stop - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::vector<double> parse_real_list(const std::string& s, const char* flag) {
  std::vector<double> v;
  try {
    for (const auto& item : split_list(s)) v.push_back(parse_double(item));
  } catch (const FormatError&) {
    throw InvalidParameter(std::string(flag) + ": expected a number or comma-separated list");
  }
  return v;
}

inline std::vector<int> parse_int_list(const std::string& s, const char* flag) {
  std::vector<int> v;
  for (double x : parse_real_list(s, flag)) {
    if (x != static_cast<double>(static_cast<int>(x)))
      throw InvalidParameter(std::string(flag) + ": expected integers");
    v.push_back(static_cast<int>(x));
  }
  return v;
}

struct CommonFlags {
  std::optional<std::string> config, n, eps, s, p, out;
  std::optional<double> length, tmax, tol, gamma0, gamma1;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iter;

  void attach(CLI::App* app, bool with_spfc) {
    app->add_option("--config", config, "JSON config file (flags override its keys)");
    app->add_option("--n", n, "cells per side");
    app->add_option("--L", length, "domain side length");
    app->add_option("--p", p, "p-Laplacian exponent");
    app->add_option("--eps", eps, "surface diffusion parameter");
    app->add_option("--s", s, "time step");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--tmax", tmax, "final time");
    app->add_option("--out", out, "output directory");
    app->add_option("--tol", tol, "solver tolerance");
    app->add_option("--max-iter", max_iter, "PSD iteration cap");
    if (with_spfc) {
      app->add_option("--gamma0", gamma0, "SPFC gamma0");
      app->add_option("--gamma1", gamma1, "SPFC gamma1");
    }
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c = config ? load_config(*config) : ExperimentConfig{};
    if (n) c.n = parse_int_list(*n, "--n");
    if (eps) c.eps = parse_real_list(*eps, "--eps");
    if (s) c.s = parse_real_list(*s, "--s");
    if (p) c.p = parse_real_list(*p, "--p");
    if (out) c.output_dir = *out;
    if (length) c.length = length;
    if (tmax) c.tmax = tmax;
    if (tol) c.tol = tol;
    if (gamma0) c.gamma0 = gamma0;
    if (gamma1) c.gamma1 = gamma1;
    if (seed) c.seed = *seed;
    if (max_iter) c.max_iter = max_iter;
    return c;
  }
};

inline void require_kind(const ExperimentConfig& c, std::initializer_list<ExperimentKind> ok,
                         const char* command) {
  if (!c.kind) return;
  for (auto k : ok)
    if (*c.kind == k) return;
  throw InvalidParameter(std::string("config kind '") + to_string(*c.kind) +
                         "' does not match command '" + command + "'");
}

inline int run_converge(const ExperimentConfig& c, std::ostream& out) {
  require_kind(c, {ExperimentKind::converge}, "converge");
  const auto rows = cauchy_convergence(parse_convergence_kind(c.problem), c.levels,
                                       convergence_settings(c));
  write_rate_table(out, rows);
  if (!c.output_dir.empty()) {
    std::filesystem::create_directories(c.output_dir);
    auto os = open_output((std::filesystem::path(c.output_dir) / "rates.csv").string());
    write_rate_table(os, rows);
  }
  return kExitOk;
}

inline int run_complexity(const ExperimentConfig& c, std::ostream& out) {
  require_kind(c, {ExperimentKind::complexity}, "complexity");
  const ComplexitySweep sw = complexity_sweep(c);
  std::vector<ComplexityTrace> traces;
  for (int n : sw.n)
    for (double e : sw.eps)
      for (double s : sw.s)
        for (double p : sw.p)
          traces.push_back(complexity_trace({n, e, s, p}, sw.gamma_tol, sw.max_iter));
  write_complexity_summary(out, traces);
  if (!c.output_dir.empty()) {
    const std::filesystem::path dir(c.output_dir);
    std::filesystem::create_directories(dir);
    auto os = open_output((dir / "summary.csv").string());
    write_complexity_summary(os, traces);
    for (std::size_t k = 0; k < traces.size(); ++k) {
      auto ts = open_output((dir / ("trace_" + std::to_string(k) + ".csv")).string());
      write_trace(ts, traces[k]);
    }
  }
  return kExitOk;
}

inline int run_evolve(const ExperimentConfig& c, const std::optional<std::string>& model,
                      std::ostream& out) {
  require_kind(c, {ExperimentKind::evolve_thin_film, ExperimentKind::evolve_spfc}, "evolve");
  ExperimentKind kind = c.kind.value_or(ExperimentKind::evolve_thin_film);
  if (model) {
    if (*model == "thin-film") kind = ExperimentKind::evolve_thin_film;
    else if (*model == "spfc") kind = ExperimentKind::evolve_spfc;
    else throw InvalidParameter("--model must be thin-film or spfc");
  }
  const auto res = evolve(evolve_settings(c, kind));
  out << "steps=" << res.records.size() - 1 << " roughness_slope="
      << csv_number(res.roughness_fit.slope) << " energy_slope=" << csv_number(res.energy_fit.slope)
      << '\n';
  return kExitOk;
}

}  // namespace detail

/// Command-line entry point. Returns 0 on success, 1 on usage or config
/// errors, 2 when a solve fails.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Preconditioned steepest descent experiments for p-Laplacian gradient flows",
               "gridflow"};
  app.set_version_flag("--version", std::string("gridflow ") + GRIDFLOW_VERSION);
  app.require_subcommand(1);

  detail::CommonFlags conv_flags, cx_flags, ev_flags;
  std::optional<std::string> conv_kind, conv_levels;
  std::optional<std::string> ev_model, ev_snaps, ev_window, ev_initial;

  auto* conv = app.add_subcommand("converge", "Cauchy convergence table");
  conv_flags.attach(conv, false);
  conv->add_option("--kind", conv_kind, "p4 or p6");
  conv->add_option("--levels", conv_levels, "doubling grid sizes, e.g. 16,32,64");

  auto* cx = app.add_subcommand("complexity", "PSD iteration traces on a manufactured problem");
  cx_flags.attach(cx, false);

  auto* ev = app.add_subcommand("evolve", "long-time thin-film or SPFC evolution");
  ev_flags.attach(ev, true);
  ev->add_option("--model", ev_model, "thin-film or spfc");
  ev->add_option("--snapshots", ev_snaps, "snapshot times, comma-separated");
  ev->add_option("--window", ev_window, "slope-fit window lo,hi");
  ev->add_option("--initial", ev_initial, "random, nucleation or sinusoidal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (conv->parsed()) {
      ExperimentConfig c = conv_flags.resolve();
      if (conv_kind) c.problem = *conv_kind;
      if (conv_levels) c.levels = detail::parse_int_list(*conv_levels, "--levels");
      return detail::run_converge(c, out);
    }
    if (cx->parsed()) return detail::run_complexity(cx_flags.resolve(), out);
    ExperimentConfig c = ev_flags.resolve();
    if (ev_snaps) c.snapshot_times = detail::parse_real_list(*ev_snaps, "--snapshots");
    if (ev_window) {
      const auto w = detail::parse_real_list(*ev_window, "--window");
      if (w.size() != 2 || !(w[0] < w[1])) throw InvalidParameter("--window must be lo,hi");
      c.slope_window = std::pair{w[0], w[1]};
    }
    if (ev_initial) c.initial = *ev_initial;
    return detail::run_evolve(c, ev_model, out);
  } catch (const SolverFailure& e) {
    err << "gridflow: solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const NotDescent& e) {
    err << "gridflow: solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const NoBracket& e) {
    err << "gridflow: solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const NonZeroMean& e) {
    err << "gridflow: solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "gridflow: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace gridflow

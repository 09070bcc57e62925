#pragma once

// Cauchy self-convergence tests for the thin-film scheme on a refinement
// path s = h^2 / 10.

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gridflow/models.hpp"

namespace gridflow {

/// Bilinear prolongation from n to 2n cells. Fine cells 2c and 2c+1 sit at
/// -h_c/4 and +h_c/4 from coarse center c, so the 1D weights are 3/4 on c and
/// 1/4 on the neighbor on the same side.
inline CellField interpolate_coarse_to_fine(const CellField& uc, const GridSpec& fine) {
  const GridSpec& coarse = uc.grid();
  if (fine.n() != 2 * coarse.n() || fine.length() != coarse.length())
    throw GridMismatch("fine grid must have twice the cells on the same domain");
  CellField uf(fine);
  for (int I = 0; I < fine.n(); ++I) {
    const int ci = I / 2;
    const int ni = (I % 2 == 0) ? ci - 1 : ci + 1;
    for (int J = 0; J < fine.n(); ++J) {
      const int cj = J / 2;
      const int nj = (J % 2 == 0) ? cj - 1 : cj + 1;
      uf(I, J) = 0.5625 * uc(ci, cj) + 0.1875 * uc.periodic(ni, cj) +
                 0.1875 * uc.periodic(ci, nj) + 0.0625 * uc.periodic(ni, nj);
    }
  }
  return uf;
}

enum class ConvergenceKind { p4, p6 };

inline double convergence_p(ConvergenceKind k) { return k == ConvergenceKind::p4 ? 4.0 : 6.0; }

inline ConvergenceKind parse_convergence_kind(const std::string& s) {
  if (s == "p4") return ConvergenceKind::p4;
  if (s == "p6") return ConvergenceKind::p6;
  throw InvalidParameter("unknown convergence kind '" + s + "' (expected p4 or p6)");
}

struct ConvergenceSettings {
  double length = 3.2;
  double eps = 0.1;
  double final_time = 0.32;
  double step_factor = 0.1;  ///< s = step_factor * h^2
  PsdConfig solver{};
};

struct RateTableRow {
  double h_c = 0.0;
  double h_f = 0.0;
  double cauchy_norm = 0.0;
  std::optional<double> rate;
  double avg_iters = 0.0;  ///< mean PSD iterations per step on the fine level
  double cpu_s = 0.0;      ///< mean wall-clock seconds per step on the fine level
};

struct LevelRun {
  CellField u;
  int steps = 0;
  double avg_iters = 0.0;
  double sec_per_step = 0.0;
};

/// Evolves the thin-film scheme from the sinusoidal data to T on an n-cell grid.
inline LevelRun run_convergence_level(ConvergenceKind kind, int n, const ConvergenceSettings& cs) {
  const GridSpec grid(n, cs.length);
  const double h = grid.spacing();
  const double s = cs.step_factor * h * h;
  const int steps = static_cast<int>(std::lround(cs.final_time / s));
  const ThinFilmParams params{convergence_p(kind), cs.eps, s};
  SpectralWorkspace ws(grid);
  PsdConfig cfg = cs.solver;
  cfg.record_energy = false;

  CellField u = initial_sinusoidal(grid);
  long total_iters = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < steps; ++k) {
    auto res = thin_film_step(u, params, ws, cfg);
    if (!res.report.converged)
      throw SolverFailure("PSD did not converge at step " + std::to_string(k + 1) + " on n=" +
                          std::to_string(n));
    total_iters += res.report.iterations;
    u = std::move(res.u);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(u), steps, static_cast<double>(total_iters) / steps, secs / steps};
}

/// One row per consecutive level pair (n_k, n_{k+1}).
inline std::vector<RateTableRow> cauchy_convergence(ConvergenceKind kind,
                                                    const std::vector<int>& levels,
                                                    const ConvergenceSettings& cs = {}) {
  if (levels.size() < 2) throw InvalidParameter("need at least two levels");
  for (std::size_t k = 1; k < levels.size(); ++k)
    if (levels[k] != 2 * levels[k - 1]) throw InvalidParameter("levels must strictly double");

  std::vector<LevelRun> runs;
  runs.reserve(levels.size());
  for (int n : levels) runs.push_back(run_convergence_level(kind, n, cs));

  std::vector<RateTableRow> rows;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const CellField& fine = runs[k].u;
    const CellField coarse_up = interpolate_coarse_to_fine(runs[k - 1].u, fine.grid());
    RateTableRow row;
    row.h_c = runs[k - 1].u.grid().spacing();
    row.h_f = fine.grid().spacing();
    row.cauchy_norm = norm2(fine - coarse_up);
    if (!rows.empty()) row.rate = std::log2(rows.back().cauchy_norm / row.cauchy_norm);
    row.avg_iters = runs[k].avg_iters;
    row.cpu_s = runs[k].sec_per_step;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gridflow

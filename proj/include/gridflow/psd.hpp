#pragma once

// Preconditioned steepest descent:
//
//   r^k = f - N[u^k],  L[d^k] = r^k,  alpha_k = argzero q,  u^{k+1} = u^k + alpha_k d^k.
//
// The preconditioner L is the constant-coefficient linear part of N, solved
// exactly in Fourier space.

#include <cmath>
#include <concepts>
#include <vector>

#include "gridflow/line_search.hpp"
#include "gridflow/problems.hpp"
#include "gridflow/spectral.hpp"

namespace gridflow {

struct PsdConfig {
  double tol_rel = 1e-9;   ///< stop when ||r||_2 <= tol_abs + tol_rel ||f||_2
  double tol_abs = 1e-14;
  int max_iter = 200;
  double ls_tol = 1e-12;
  int ls_max_iter = 100;
  bool record_energy = true;
  /// Disable to stop on an external criterion only (see psd_solve observer).
  bool residual_stop = true;

  void validate() const {
    if (!(tol_rel > 0.0 && tol_abs > 0.0 && ls_tol > 0.0))
      throw InvalidParameter("solver tolerances must be positive");
    if (max_iter < 1 || ls_max_iter < 1)
      throw InvalidParameter("iteration limits must be positive");
  }
  LineSearchOptions line_search() const { return {ls_tol, ls_max_iter}; }
};

struct PsdReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  ///< ||r^k||_2, k = 0..iterations
  std::vector<double> alpha_history;     ///< alpha_k, k = 0..iterations-1
  std::vector<double> energy_history;    ///< E[u^k] when recorded
  int line_search_iterations = 0;
};

struct PsdResult {
  CellField u;
  PsdReport report;
};

struct NoObserver {
  bool operator()(int, const CellField&) const noexcept { return false; }
};

namespace detail {

inline CellField psd_residual(const FourthOrderProblem& prob, const CellField& u,
                              const SpectralWorkspace&) {
  return residual(prob, u);
}
inline CellField psd_residual(const SixthOrderProblem& prob, const CellField& u,
                              const SpectralWorkspace& ws) {
  return residual(prob, u, ws);
}
inline double psd_energy(const FourthOrderProblem& prob, const CellField& u,
                         const SpectralWorkspace&) {
  return energy(prob, u);
}
inline double psd_energy(const SixthOrderProblem& prob, const CellField& u,
                         const SpectralWorkspace& ws) {
  return energy(prob, u, ws);
}
inline LineSearchFunction psd_line_function(const FourthOrderProblem& prob, const CellField& u,
                                            const CellField& d, const SpectralWorkspace&) {
  return line_search_function(prob, u, d);
}
inline LineSearchFunction psd_line_function(const SixthOrderProblem& prob, const CellField& u,
                                            const CellField& d, const SpectralWorkspace& ws) {
  return line_search_function(prob, u, d, ws);
}
inline double psd_precond_norm_sq(const FourthOrderProblem& prob, const CellField& d,
                                  const SpectralWorkspace&) {
  return precond_norm_sq(prob, d);
}
inline double psd_precond_norm_sq(const SixthOrderProblem& prob, const CellField& d,
                                  const SpectralWorkspace& ws) {
  return precond_norm_sq(prob, d, ws);
}
inline void psd_check_constraint(const FourthOrderProblem&, const CellField&) {}
inline void psd_check_constraint(const SixthOrderProblem& prob, const CellField& u) {
  check_mean_constraint(prob, u);
}

}  // namespace detail

template <class Problem>
concept PsdProblem = requires(const Problem& p, const CellField& u, const SpectralWorkspace& ws) {
  { detail::psd_residual(p, u, ws) } -> std::same_as<CellField>;
  { precond_solve(p, u, ws) } -> std::same_as<CellField>;
};

/// d with L[d] = f - N[u]; mean-zero for the sixth-order problem.
template <PsdProblem Problem>
CellField search_direction(const Problem& prob, const CellField& u, const SpectralWorkspace& ws) {
  detail::psd_check_constraint(prob, u);
  return precond_solve(prob, detail::psd_residual(prob, u, ws), ws);
}

/// Exact step length along d from u.
template <PsdProblem Problem>
LineSearchResult line_search_detailed(const Problem& prob, const CellField& u, const CellField& d,
                                      const SpectralWorkspace& ws, const PsdConfig& cfg = {}) {
  const auto q = detail::psd_line_function(prob, u, d, ws);
  return find_line_search_root(q, cfg.line_search(), detail::psd_precond_norm_sq(prob, d, ws));
}

template <PsdProblem Problem>
double line_search(const Problem& prob, const CellField& u, const CellField& d,
                   const SpectralWorkspace& ws, const PsdConfig& cfg = {}) {
  return line_search_detailed(prob, u, d, ws, cfg).alpha;
}

/// Runs PSD from u0. The observer is called as observer(k, u^k) before each
/// iteration; returning true stops the solve and marks it converged.
/// Hitting max_iter is soft: the report comes back with converged = false.
template <PsdProblem Problem, class Observer = NoObserver>
PsdResult psd_solve(const CellField& u0, const Problem& prob, const SpectralWorkspace& ws,
                    const PsdConfig& cfg = {}, Observer&& observer = {}) {
  cfg.validate();
  detail::psd_check_constraint(prob, u0);
  PsdResult out{u0, {}};
  CellField& u = out.u;
  PsdReport& rep = out.report;

  CellField r = detail::psd_residual(prob, u, ws);
  double rn = norm2(r);
  rep.residual_history.push_back(rn);
  if (cfg.record_energy) rep.energy_history.push_back(detail::psd_energy(prob, u, ws));
  const double tol = cfg.tol_abs + cfg.tol_rel * norm2(prob.f());

  for (int k = 0;; ++k) {
    if (observer(k, static_cast<const CellField&>(u)) || (cfg.residual_stop && rn <= tol) ||
        rn == 0.0) {
      rep.converged = true;
      break;
    }
    if (k == cfg.max_iter) break;

    const CellField d = precond_solve(prob, r, ws);
    // <r, d> = ||d||_L^2 > 0; it doubles as -q(0) and the line-search scale.
    const double rd = inner_product(r, d);
    if (!(rd > 0.0)) break;
    auto q = detail::psd_line_function(prob, u, d, ws);
    q.set_value_at_zero(-rd);
    const LineSearchResult ls = find_line_search_root(q, cfg.line_search(), rd);

    u.axpy(ls.alpha, d);
    r = detail::psd_residual(prob, u, ws);
    rn = norm2(r);
    rep.iterations = k + 1;
    rep.line_search_iterations += ls.iterations;
    rep.alpha_history.push_back(ls.alpha);
    rep.residual_history.push_back(rn);
    if (cfg.record_energy) rep.energy_history.push_back(detail::psd_energy(prob, u, ws));
  }
  return out;
}

}  // namespace gridflow

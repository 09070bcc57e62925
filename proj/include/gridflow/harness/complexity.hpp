#pragma once

// Solver complexity on a manufactured fourth-order problem over the unit
// square. The exact discrete solution is the sampled field
//   u~(x, y; s) = sin(2 pi x) cos(2 pi y) cos(s) / (2 pi),
// with f := N_h[u~(s)], so the error to it can be tracked per iteration.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gridflow/psd.hpp"

namespace gridflow {

struct ComplexityCase {
  int n = 128;
  double eps = 0.03;
  double s = 0.01;
  double p = 4.0;
};

struct ComplexityTrace {
  ComplexityCase params;
  std::vector<double> gamma;  ///< gamma_k = ||u^k - u~||_inf, k = 0..
  int iterations = 0;
  bool reached_tol = false;
};

inline CellField manufactured_solution(const GridSpec& grid, double s) {
  constexpr double tp = 2.0 * std::numbers::pi;
  return CellField::sample(grid, [s](double x, double y) {
    return std::sin(tp * x) * std::cos(tp * y) * std::cos(s) / tp;
  });
}

/// u~(., 0) + s^2 sin(4 pi x) sin(6 pi y).
inline CellField manufactured_start(const GridSpec& grid, double s) {
  constexpr double pi = std::numbers::pi;
  CellField u = manufactured_solution(grid, 0.0);
  u += CellField::sample(grid, [s](double x, double y) {
    return s * s * std::sin(4.0 * pi * x) * std::sin(6.0 * pi * y);
  });
  return u;
}

/// Runs PSD with the error-to-exact stopping rule gamma_k <= gamma_tol. The
/// residual test is disabled; hitting max_iter is recorded, not thrown.
inline ComplexityTrace complexity_trace(const ComplexityCase& c, double gamma_tol = 1e-8,
                                        int max_iter = 2000) {
  const GridSpec grid(c.n, 1.0);
  SpectralWorkspace ws(grid);
  const CellField exact = manufactured_solution(grid, c.s);
  FourthOrderProblem prob(c.s, c.eps, c.p, CellField(grid));
  prob = FourthOrderProblem(c.s, c.eps, c.p, nonlinear_operator(prob, exact));

  PsdConfig cfg;
  cfg.max_iter = max_iter;
  cfg.residual_stop = false;
  cfg.record_energy = false;

  ComplexityTrace trace{c, {}, 0, false};
  auto observer = [&](int, const CellField& u) {
    const double g = norm_inf(u - exact);
    trace.gamma.push_back(g);
    return g <= gamma_tol;
  };
  const auto res = psd_solve(manufactured_start(grid, c.s), prob, ws, cfg, observer);
  trace.iterations = res.report.iterations;
  trace.reached_tol = res.report.converged;
  return trace;
}

/// Cartesian product of the sweep lists, in (n, eps, s, p) nesting order.
inline std::vector<ComplexityTrace> complexity_study(const std::vector<int>& ns,
                                                     const std::vector<double>& epss,
                                                     const std::vector<double>& ss,
                                                     const std::vector<double>& ps,
                                                     double gamma_tol = 1e-8) {
  std::vector<ComplexityTrace> out;
  for (int n : ns)
    for (double e : epss)
      for (double s : ss)
        for (double p : ps) out.push_back(complexity_trace({n, e, s, p}, gamma_tol));
  return out;
}

}  // namespace gridflow

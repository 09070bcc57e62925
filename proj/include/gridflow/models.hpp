#pragma once

// Time-stepping drivers built on the PSD solver.
//
// Thin-film epitaxy with slope selection (L2 gradient flow, convex splitting):
//   u^{n+1} - s div_v(|grad_v u^{n+1}|^{p-2} grad_v u^{n+1}) + s eps^2 Delta_h^2 u^{n+1}
//     = u^n - s Delta_v u^n.
//
// Square phase field crystal (H^{-1} gradient flow, convex splitting):
//   u^{n+1} - Delta_h w^{n+1} = u^n,
//   s g0 u^{n+1} - s div_v(|grad_v u^{n+1}|^2 grad_v u^{n+1}) + s eps^2 Delta_h^2 u^{n+1}
//     - w^{n+1} = -s g1 Delta_h u^n.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "gridflow/psd.hpp"
#include "gridflow/random.hpp"

namespace gridflow {

struct ThinFilmParams {
  double p = 4.0;
  double eps = 0.1;
  double s = 0.01;

  void validate() const {
    if (!is_even_integer(p) || p < 4.0) throw InvalidParameter("thin film needs even p >= 4");
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParameter("eps must lie in (0, 1]");
    if (!(s > 0.0)) throw InvalidParameter("time step must be positive");
  }
};

struct SpfcParams {
  double eps = 1.0;
  double gamma0 = 0.5;
  double gamma1 = 2.0;
  double s = 0.01;
  static constexpr double p = 4.0;

  void validate() const {
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParameter("eps must lie in (0, 1]");
    if (!(gamma0 >= 0.0 && gamma1 >= 0.0)) throw InvalidParameter("gamma0, gamma1 must be >= 0");
    if (!(s > 0.0)) throw InvalidParameter("time step must be positive");
  }
};

struct EvolutionRecord {
  int step = 0;
  double time = 0.0;
  double energy = 0.0;
  double roughness = 0.0;
  int solver_iters = 0;
  double wall_ms = 0.0;
};

struct StepResult {
  CellField u;
  PsdReport report;
};

struct SpfcStepResult {
  CellField u;
  CellField w;
  CellField f;
  PsdReport report;
};

// ---- problems and steps -----------------------------------------------------

inline FourthOrderProblem thin_film_problem(const CellField& u_n, const ThinFilmParams& params) {
  params.validate();
  CellField f = u_n;
  f.axpy(-params.s, skew_laplacian(u_n));
  return FourthOrderProblem(params.s, params.eps, params.p, std::move(f));
}

inline StepResult thin_film_step(const CellField& u_n, const ThinFilmParams& params,
                                 const SpectralWorkspace& ws, const PsdConfig& cfg = {}) {
  const auto prob = thin_film_problem(u_n, params);
  auto res = psd_solve(u_n, prob, ws, cfg);
  return {std::move(res.u), std::move(res.report)};
}

inline SixthOrderProblem spfc_problem(const CellField& u_n, const SpfcParams& params) {
  params.validate();
  CellField f = laplacian(u_n);
  f *= -params.s * params.gamma1;
  return SixthOrderProblem(params.s, params.eps, SpfcParams::p, params.gamma0, std::move(f), u_n);
}

/// One SPFC step. w is recovered from u^{n+1} - Delta_h w = u^n plus the mean
/// of the second equation: mean(w) = s g0 mean(u^{n+1}) - mean(f).
inline SpfcStepResult spfc_step(const CellField& u_n, const SpfcParams& params,
                                const SpectralWorkspace& ws, const PsdConfig& cfg = {}) {
  auto prob = spfc_problem(u_n, params);
  auto res = psd_solve(u_n, prob, ws, cfg);
  CellField w = solve_T(detail::mean_zero_difference(u_n, res.u), ws);
  w += params.s * params.gamma0 * mean(res.u) - mean(prob.f());
  return {std::move(res.u), std::move(w), prob.f(), std::move(res.report)};
}

// ---- initial data -----------------------------------------------------------

/// Smooth periodic data for Cauchy convergence tests.
inline CellField initial_sinusoidal(const GridSpec& grid) {
  const double L = grid.length();
  constexpr double pi = std::numbers::pi;
  return CellField::sample(grid, [L](double x, double y) {
    const double sx = std::sin(2.0 * pi * x / L);
    return 0.1 * sx * sx * std::sin(4.0 * pi * (y - 1.4) / L) -
           0.1 * std::cos(2.0 * pi * (x - 2.0) / L) * std::sin(2.0 * pi * y / L);
  });
}

/// amplitude * (2 r - 1), r uniform on [0, 1), filled in storage order.
inline CellField initial_random(const GridSpec& grid, std::uint64_t seed, double amplitude = 0.05) {
  UniformStream rng(seed);
  CellField u(grid);
  for (auto& v : u.values()) v = amplitude * (2.0 * rng.next() - 1.0);
  return u;
}

struct NucleationSite {
  double x;
  double y;
};

/// Random background plus Gaussian bumps a exp(-|x - c|^2 / (2 sigma^2)),
/// with distances measured to the nearest periodic image.
inline CellField initial_nucleation(const GridSpec& grid, std::uint64_t seed,
                                    const std::vector<NucleationSite>& sites,
                                    double background = 0.05, double bump = 0.3,
                                    double sigma = 2.0) {
  CellField u = initial_random(grid, seed, background);
  const double L = grid.length();
  auto periodic_delta = [L](double a, double b) {
    double d = std::fmod(a - b, L);
    if (d > 0.5 * L) d -= L;
    if (d < -0.5 * L) d += L;
    return d;
  };
  for (const auto& c : sites) {
    for (int i = 0; i < grid.n(); ++i) {
      const double dx = periodic_delta(grid.center(i), c.x);
      for (int j = 0; j < grid.n(); ++j) {
        const double dy = periodic_delta(grid.center(j), c.y);
        u(i, j) += bump * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      }
    }
  }
  return u;
}

// ---- diagnostics ------------------------------------------------------------

/// RMS deviation from the mean, W = ||u - mean(u)||_2 / L.
inline double roughness(const CellField& u) {
  return norm2(project_mean_zero(u)) / u.grid().length();
}

/// (1/p) ||grad_v u||_p^p - 1/2 ||grad_v u||_2^2 + eps^2/2 ||Delta_h u||_2^2.
inline double physical_energy(const ThinFilmParams& params, const CellField& u) {
  const CellField lap = laplacian(u);
  return grad_norm_p_pow(u, params.p) / params.p - 0.5 * grad_norm_p_pow(u, 2.0) +
         0.5 * params.eps * params.eps * inner_product(lap, lap);
}

/// g0/2 ||u||^2 - g1/2 ||grad_h u||^2 + eps^2/2 ||Delta_h u||^2 + 1/4 ||grad_v u||_4^4.
/// The concave term uses the edge gradient, matching the explicit -g1 Delta_h
/// u^n in the scheme.
inline double physical_energy(const SpfcParams& params, const CellField& u) {
  const CellField lap = laplacian(u);
  const double ge = grad_norm_2_edge(u);
  return 0.5 * params.gamma0 * inner_product(u, u) - 0.5 * params.gamma1 * ge * ge +
         0.5 * params.eps * params.eps * inner_product(lap, lap) +
         0.25 * grad_norm_p_pow(u, 4.0);
}

/// Minimum of the slope-selection density (1/p) g^p - g^2 / 2, attained at |g| = 1.
inline double thin_film_energy_floor(const ThinFilmParams& params, const GridSpec& grid) {
  return (1.0 / params.p - 0.5) * grid.length() * grid.length();
}

}  // namespace gridflow

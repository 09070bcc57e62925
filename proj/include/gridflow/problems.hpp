#pragma once

// The two discrete minimization problems.
//
// Fourth order: given f, find u with
//   N[u] := u - s div_v(|grad_v u|^{p-2} grad_v u) + s eps^2 Delta_h^2 u = f,
// the Euler-Lagrange equation of
//   E[u] = 1/2 ||u - f||^2 + s/p ||grad_v u||_p^p + s eps^2 / 2 ||Delta_h u||^2.
//
// Sixth order: given f, g, find u with mean(u) = mean(g) and
//   N[u] := s lambda u - s div_v(...) + s eps^2 Delta_h^2 u + T_h[u - g] = f
// modulo constants. The solver works on u directly; the energy is written in
// the shifted variable nu = u - mean(g), which is mean-zero.

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridflow/grid.hpp"
#include "gridflow/spectral.hpp"

namespace gridflow {

class FourthOrderProblem {
 public:
  FourthOrderProblem(double s, double eps, double p, CellField f)
      : s_(s), eps_(eps), p_(p), f_(std::move(f)) {
    if (!(s > 0.0)) throw InvalidParameter("s must be positive");
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParameter("eps must lie in (0, 1]");
    if (!(p >= 2.0)) throw InvalidParameter("p must be >= 2");
  }

  double s() const noexcept { return s_; }
  double eps() const noexcept { return eps_; }
  double p() const noexcept { return p_; }
  const CellField& f() const noexcept { return f_; }
  const GridSpec& grid() const noexcept { return f_.grid(); }

 private:
  double s_, eps_, p_;
  CellField f_;
};

class SixthOrderProblem {
 public:
  SixthOrderProblem(double s, double eps, double p, double lambda, CellField f, CellField g)
      : s_(s), eps_(eps), p_(p), lambda_(lambda), f_(std::move(f)), g_(std::move(g)) {
    if (!(s > 0.0)) throw InvalidParameter("s must be positive");
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParameter("eps must lie in (0, 1]");
    if (!(p >= 2.0)) throw InvalidParameter("p must be >= 2");
    if (!(lambda >= 0.0)) throw InvalidParameter("lambda must be >= 0");
    f_.check_same_grid(g_);
    g_bar_ = mean(g_);
  }

  double s() const noexcept { return s_; }
  double eps() const noexcept { return eps_; }
  double p() const noexcept { return p_; }
  double lambda() const noexcept { return lambda_; }
  const CellField& f() const noexcept { return f_; }
  const CellField& g() const noexcept { return g_; }
  double g_bar() const noexcept { return g_bar_; }
  const GridSpec& grid() const noexcept { return f_.grid(); }

 private:
  double s_, eps_, p_, lambda_;
  CellField f_, g_;
  double g_bar_;
};

struct ConvergenceConstants {
  double c5;
  double c6;
  double c7;
};

/// Sampled envelope for the discrete Sobolev constant; see the grid tests.
inline constexpr double kDefaultSobolevConstant = 6.0;

// ---- fourth order -----------------------------------------------------------

inline CellField nonlinear_operator(const FourthOrderProblem& prob, const CellField& u) {
  CellField out = u;
  out.axpy(-prob.s(), p_laplacian(u, prob.p()));
  out.axpy(prob.s() * prob.eps() * prob.eps(), bilaplacian(u));
  return out;
}

/// f - N[u]: the L2 representative of -dE[u].
inline CellField residual(const FourthOrderProblem& prob, const CellField& u) {
  return prob.f() - nonlinear_operator(prob, u);
}

inline double energy(const FourthOrderProblem& prob, const CellField& u) {
  const CellField diff = u - prob.f();
  const CellField lap = laplacian(u);
  return 0.5 * inner_product(diff, diff) + prob.s() / prob.p() * grad_norm_p_pow(u, prob.p()) +
         0.5 * prob.s() * prob.eps() * prob.eps() * inner_product(lap, lap);
}

/// L[v] = v - s Delta_h v + s eps^2 Delta_h^2 v by stencils.
inline CellField apply_preconditioner(const FourthOrderProblem& prob, const CellField& v) {
  const CellField lap = laplacian(v);
  CellField out = v;
  out.axpy(-prob.s(), lap);
  out.axpy(prob.s() * prob.eps() * prob.eps(), laplacian(lap));
  return out;
}

inline double precond_norm_sq(const FourthOrderProblem& prob, const CellField& v) {
  const CellField lap = laplacian(v);
  const double g = grad_norm_2_edge(v);
  return inner_product(v, v) + prob.s() * g * g +
         prob.s() * prob.eps() * prob.eps() * inner_product(lap, lap);
}

inline CellField precond_solve(const FourthOrderProblem& prob, const CellField& r,
                               const SpectralWorkspace& ws) {
  return solve_precond_4th(r, prob.s(), prob.eps(), ws);
}

// ---- sixth order ------------------------------------------------------------

namespace detail {

inline double mean_constraint_tol(const CellField& a, const CellField& b) {
  return 1e-12 * std::max({norm_inf(a), norm_inf(b), std::numeric_limits<double>::min()});
}

// a - b, which must be mean-zero up to roundoff in the operands; the tiny
// leftover mean is projected out.
inline CellField mean_zero_difference(const CellField& a, const CellField& b) {
  CellField d = a - b;
  const double m = mean(d);
  const double tol = mean_constraint_tol(a, b);
  if (!(std::abs(m) <= tol)) throw NonZeroMean(m, tol);
  d -= m;
  return d;
}

}  // namespace detail

/// Throws NonZeroMean unless mean(u) matches mean(g).
inline void check_mean_constraint(const SixthOrderProblem& prob, const CellField& u) {
  const double m = mean(u) - prob.g_bar();
  const double tol = detail::mean_constraint_tol(u, prob.g());
  if (!(std::abs(m) <= tol)) throw NonZeroMean(m, tol);
}

inline CellField nonlinear_operator(const SixthOrderProblem& prob, const CellField& u,
                                    const SpectralWorkspace& ws) {
  CellField out = solve_T(detail::mean_zero_difference(u, prob.g()), ws);
  out.axpy(prob.s() * prob.lambda(), u);
  out.axpy(-prob.s(), p_laplacian(u, prob.p()));
  out.axpy(prob.s() * prob.eps() * prob.eps(), bilaplacian(u));
  return out;
}

/// Mean-zero projection of f - N[u]. f - N[u] carries the constant
/// mean(f) - s lambda mean(u), which can dwarf the residual near convergence;
/// the second pass removes the roundoff the first one leaves behind.
inline CellField residual(const SixthOrderProblem& prob, const CellField& u,
                          const SpectralWorkspace& ws) {
  return project_mean_zero(project_mean_zero(prob.f() - nonlinear_operator(prob, u, ws)));
}

/// Energy in the shifted, mean-zero variable nu = u - mean(g).
inline double energy_shifted(const SixthOrderProblem& prob, const CellField& nu,
                             const SpectralWorkspace& ws) {
  require_mean_zero(nu, detail::mean_constraint_tol(nu, prob.g()));
  CellField z = nu - prob.g();
  z += prob.g_bar();
  z = project_mean_zero(std::move(z));
  const CellField tz = solve_T(z, ws);
  CellField shifted = nu;
  shifted += prob.g_bar();
  const CellField lap = laplacian(nu);
  const double se2 = prob.s() * prob.eps() * prob.eps();
  return 0.5 * inner_product(z, tz) +
         0.5 * prob.lambda() * prob.s() * inner_product(shifted, shifted) -
         inner_product(nu, prob.f()) + prob.s() / prob.p() * grad_norm_p_pow(nu, prob.p()) +
         0.5 * se2 * inner_product(lap, lap);
}

/// Energy of the physical unknown u (mean(u) = mean(g)).
inline double energy(const SixthOrderProblem& prob, const CellField& u,
                     const SpectralWorkspace& ws) {
  check_mean_constraint(prob, u);
  CellField nu = u;
  nu -= prob.g_bar();
  nu = project_mean_zero(std::move(nu));
  return energy_shifted(prob, nu, ws);
}

/// L[v] = s lambda v - s Delta_h v + s eps^2 Delta_h^2 v + T_h v, v mean-zero.
inline CellField apply_preconditioner(const SixthOrderProblem& prob, const CellField& v,
                                      const SpectralWorkspace& ws) {
  const CellField lap = laplacian(v);
  CellField out = solve_T(v, ws);
  out.axpy(prob.s() * prob.lambda(), v);
  out.axpy(-prob.s(), lap);
  out.axpy(prob.s() * prob.eps() * prob.eps(), laplacian(lap));
  return out;
}

inline double precond_norm_sq(const SixthOrderProblem& prob, const CellField& v,
                              const SpectralWorkspace& ws) {
  const CellField tv = solve_T(v, ws);
  const CellField lap = laplacian(v);
  const double g = grad_norm_2_edge(v);
  return prob.s() * prob.lambda() * inner_product(v, v) + inner_product(v, tv) +
         prob.s() * g * g + prob.s() * prob.eps() * prob.eps() * inner_product(lap, lap);
}

inline CellField precond_solve(const SixthOrderProblem& prob, const CellField& r,
                               const SpectralWorkspace& ws) {
  return solve_precond_6th(r, prob.s(), prob.eps(), prob.lambda(), ws);
}

// ---- convergence constants --------------------------------------------------

namespace detail {
inline double checked_c10(double E0, double p, bool data_nonzero) {
  if (!std::isfinite(E0) || E0 < 0.0 || (E0 == 0.0 && data_nonzero))
    throw InvalidE0("energy bound E0 must be positive");
  return std::pow(p * E0, 1.0 / p);
}
inline ConvergenceConstants finish(double c5, double c6) {
  return {c5, c6, 1.0 - c5 / (2.0 * c6)};
}
}  // namespace detail

/// Closed-form contraction constants for the fourth-order problem. Diagnostic
/// only: C9 is not known in closed form and is caller-supplied.
inline ConvergenceConstants convergence_constants(const FourthOrderProblem& prob, double E0,
                                                  double c9 = kDefaultSobolevConstant) {
  const double p = prob.p(), s = prob.s(), eps = prob.eps();
  const double c10 = detail::checked_c10(E0, p, norm_inf(prob.f()) > 0.0);
  const double c5 = std::min(0.5, eps / std::sqrt(s));
  const double c6 = 1.0 + (1.0 / p) * std::pow(p - 1.0, (2.0 * p - 1.0) / p) *
                              std::pow(eps, -2.0 * (p - 1.0) / p) * std::pow(s, 1.0 / p) *
                              c9 * c9 * std::pow(c10, p - 2.0);
  return detail::finish(c5, c6);
}

inline ConvergenceConstants convergence_constants(const SixthOrderProblem& prob, double E0,
                                                  double c9 = kDefaultSobolevConstant) {
  const double p = prob.p(), s = prob.s(), eps = prob.eps();
  const bool data = norm_inf(prob.f()) > 0.0 || norm_inf(prob.g()) > 0.0;
  const double c10 = detail::checked_c10(E0, p, data);
  const double c5 = std::min(1.0 / 3.0, std::pow(eps, 4.0 / 3.0) * std::pow(s, -1.0 / 3.0));
  const double q = 3.0 * p;
  const double c6 = 1.0 + (p - 1.0) * std::pow(q / 2.0, -2.0 / q) *
                              std::pow(q / (q - 2.0), (2.0 - q) / q) *
                              std::pow(eps, (4.0 - 6.0 * p) / q) * std::pow(s, 2.0 / q) * c9 *
                              c9 * std::pow(c10, p - 2.0);
  return detail::finish(c5, c6);
}

}  // namespace gridflow

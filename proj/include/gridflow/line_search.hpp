#pragma once

// Exact line search along a search direction d:
//
//   q(alpha) = dE[u + alpha d](d) = <N[u + alpha d] - f, d>_2,
//
// which is strictly increasing in alpha by strict convexity of E. The
// nonlinear part is a vertex sum
//
//   s h^2 sum_v (A + 2 B alpha + C alpha^2)^{(p-2)/2} (B + C alpha),
//   A = |grad u|^2, B = grad u . grad d, C = |grad d|^2,
//
// a polynomial of degree p - 1 when p is an even integer. The remaining
// terms are affine in alpha.

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "gridflow/polynomial.hpp"
#include "gridflow/problems.hpp"

namespace gridflow {

struct LineSearchOptions {
  double tol = 1e-12;
  int max_iter = 100;
};

struct LineSearchResult {
  double alpha = 0.0;
  double q_alpha = 0.0;
  double q_zero = 0.0;
  int iterations = 0;
  bool polynomial = false;
};

/// true when p is an even integer, so q expands to a finite polynomial.
inline bool is_even_integer(double p) noexcept {
  return p >= 2.0 && p == std::floor(p) && std::fmod(p, 2.0) == 0.0;
}

/// q(alpha) for one (u, d) pair, precomputed once per line search.
class LineSearchFunction {
 public:
  LineSearchFunction(const CellField& u, const CellField& d, double s, double p,
                     double linear0, double linear1)
      : p_(p), linear0_(linear0), linear1_(linear1) {
    const double h = u.grid().spacing();
    weight_ = s * h * h;
    auto gu = grad_v(u);
    auto gd = grad_v(d);
    gux_ = std::vector<double>(gu.x.values().begin(), gu.x.values().end());
    guy_ = std::vector<double>(gu.y.values().begin(), gu.y.values().end());
    gdx_ = std::vector<double>(gd.x.values().begin(), gd.x.values().end());
    gdy_ = std::vector<double>(gd.y.values().begin(), gd.y.values().end());
    if (is_even_integer(p)) build_polynomial();
  }

  bool is_polynomial() const noexcept { return poly_.has_value(); }
  const std::optional<Polynomial>& polynomial() const noexcept { return poly_; }

  /// Replaces the constant term so that q(0) equals the given value. Used
  /// when -<r, d> is already known more accurately than the term-by-term sum.
  void set_value_at_zero(double q0) {
    const double shift = q0 - value(0.0);
    linear0_ += shift;
    if (poly_) (*poly_)[0] += shift;
  }

  double value(double alpha) const { return evaluate(alpha).first; }

  /// (q(alpha), q'(alpha)).
  std::pair<double, double> evaluate(double alpha) const {
    if (poly_) return {(*poly_)(alpha), poly_->derivative(alpha)};
    auto [nl, dnl] = nonlinear(alpha);
    return {linear0_ + linear1_ * alpha + nl, linear1_ + dnl};
  }

  /// Direct vertex-sum evaluation, bypassing the polynomial expansion.
  std::pair<double, double> evaluate_direct(double alpha) const {
    auto [nl, dnl] = nonlinear(alpha);
    return {linear0_ + linear1_ * alpha + nl, linear1_ + dnl};
  }

 private:
  std::pair<double, double> nonlinear(double alpha) const {
    const double e = 0.5 * (p_ - 2.0);
    double val = 0.0, der = 0.0;
    for (std::size_t k = 0; k < gux_.size(); ++k) {
      const double gx = gux_[k] + alpha * gdx_[k];
      const double gy = guy_[k] + alpha * gdy_[k];
      const double base = gx * gx + gy * gy;
      const double dot = gx * gdx_[k] + gy * gdy_[k];
      const double c = gdx_[k] * gdx_[k] + gdy_[k] * gdy_[k];
      if (e == 0.0) {
        val += dot;
        der += c;
        continue;
      }
      if (base <= 0.0) continue;
      const double r = detail::magnitude_pow(base, e);
      val += r * dot;
      der += r * c + (p_ - 2.0) * (r / base) * dot * dot;
    }
    return {weight_ * val, weight_ * der};
  }

  void build_polynomial() {
    const int m = static_cast<int>(p_ / 2.0) - 1;
    std::vector<double> acc(static_cast<std::size_t>(2 * m + 2), 0.0);
    std::vector<double> cur, next;
    for (std::size_t k = 0; k < gux_.size(); ++k) {
      const double a = gux_[k] * gux_[k] + guy_[k] * guy_[k];
      const double b = gux_[k] * gdx_[k] + guy_[k] * gdy_[k];
      const double c = gdx_[k] * gdx_[k] + gdy_[k] * gdy_[k];
      // (B + C x) * (A + 2 B x + C x^2)^m by repeated multiplication.
      cur.assign({b, c});
      for (int r = 0; r < m; ++r) {
        next.assign(cur.size() + 2, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) {
          next[i] += a * cur[i];
          next[i + 1] += 2.0 * b * cur[i];
          next[i + 2] += c * cur[i];
        }
        cur.swap(next);
      }
      for (std::size_t i = 0; i < cur.size(); ++i) acc[i] += cur[i];
    }
    for (auto& v : acc) v *= weight_;
    acc[0] += linear0_;
    acc[1] += linear1_;
    poly_ = Polynomial(std::move(acc));
  }

  double p_;
  double weight_ = 0.0;
  double linear0_, linear1_;
  std::vector<double> gux_, guy_, gdx_, gdy_;
  std::optional<Polynomial> poly_;
};

inline LineSearchFunction line_search_function(const FourthOrderProblem& prob, const CellField& u,
                                               const CellField& d) {
  const double se2 = prob.s() * prob.eps() * prob.eps();
  const CellField lap_u = laplacian(u);
  const CellField lap_d = laplacian(d);
  const double a0 = inner_product(u - prob.f(), d) + se2 * inner_product(lap_u, lap_d);
  const double a1 = inner_product(d, d) + se2 * inner_product(lap_d, lap_d);
  return LineSearchFunction(u, d, prob.s(), prob.p(), a0, a1);
}

/// Sixth order: the H^{-1} terms need a single T_h[d].
inline LineSearchFunction line_search_function(const SixthOrderProblem& prob, const CellField& u,
                                               const CellField& d, const SpectralWorkspace& ws) {
  const double s = prob.s();
  const double se2 = s * prob.eps() * prob.eps();
  const CellField td = solve_T(d, ws);
  const CellField lap_u = laplacian(u);
  const CellField lap_d = laplacian(d);
  const double a0 = s * prob.lambda() * inner_product(u, d) - inner_product(prob.f(), d) +
                    se2 * inner_product(lap_u, lap_d) + inner_product(u - prob.g(), td);
  const double a1 = s * prob.lambda() * inner_product(d, d) + se2 * inner_product(lap_d, lap_d) +
                    inner_product(d, td);
  return LineSearchFunction(u, d, s, prob.p(), a0, a1);
}

/// Finds the root of the increasing function q. Brackets by doubling from
/// [0, 1], then runs Newton steps safeguarded by bisection. Stops once
/// |q| <= tol * scale or the bracket is narrower than tol * (1 + alpha).
/// scale defaults to -q(0) = ||d||_L^2.
inline LineSearchResult find_line_search_root(const LineSearchFunction& q,
                                              const LineSearchOptions& opt,
                                              std::optional<double> scale = {}) {
  LineSearchResult res;
  res.polynomial = q.is_polynomial();
  const double q0 = q.value(0.0);
  res.q_zero = q0;
  const double ref = scale.value_or(std::abs(q0));
  const double ftol = opt.tol * ref;
  if (!std::isfinite(q0)) throw NoBracket("line-search function is not finite at zero");
  if (q0 >= 0.0) {
    if (q0 <= ftol) return res;
    throw NotDescent("search direction is not a descent direction");
  }

  double lo = 0.0, hi = 1.0;
  double qhi = q.value(hi);
  constexpr double kMaxStep = 1152921504606846976.0;  // 2^60
  while (!(qhi > 0.0)) {
    if (std::isnan(qhi)) throw NoBracket("line-search function became NaN");
    if (std::abs(qhi) <= ftol) {
      res.alpha = hi;
      res.q_alpha = qhi;
      return res;
    }
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxStep) throw NoBracket("no sign change below 2^60");
    qhi = q.value(hi);
  }

  double x = 0.5 * (lo + hi);
  for (int it = 1; it <= opt.max_iter; ++it) {
    res.iterations = it;
    const auto [qx, dqx] = q.evaluate(x);
    res.alpha = x;
    res.q_alpha = qx;
    if (std::abs(qx) <= ftol) return res;
    if (qx < 0.0)
      lo = x;
    else
      hi = x;
    if (hi - lo <= opt.tol * (1.0 + x)) return res;
    double nx = x - qx / dqx;
    if (!(dqx > 0.0) || !(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) <= 0.5 * opt.tol * (1.0 + x)) {
      res.alpha = nx;
      res.q_alpha = q.value(nx);
      return res;
    }
    x = nx;
  }
  return res;
}

}  // namespace gridflow

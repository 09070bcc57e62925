#pragma once

// Fourier diagonalization of the constant-coefficient periodic operators.
//
// Every operator handled here is a polynomial (or rational function) of the
// 5-point Laplacian, so each is a per-mode multiplier depending only on the
// eigenvalue lam(k, l) of -Delta_h:
//
//   lam(k, l) = (4 / h^2) (sin^2(pi k / n) + sin^2(pi l / n)).

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <vector>

#include "gridflow/grid.hpp"

namespace gridflow {

namespace detail {
// The FFTW planner is not reentrant.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Cached eigenvalues and r2c/c2r plans for one grid. Solves on one workspace
/// are serialized internally; distinct workspaces are independent.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const GridSpec& grid) : impl_(std::make_unique<Impl>(grid)) {}

  const GridSpec& grid() const noexcept { return impl_->grid; }

  /// Eigenvalue of -Delta_h for mode (k, l), k, l in [0, n).
  double eigenvalue(int k, int l) const noexcept {
    const int n = impl_->grid.n();
    const double h = impl_->grid.spacing();
    const double sk = std::sin(std::numbers::pi * k / n);
    const double sl = std::sin(std::numbers::pi * l / n);
    return 4.0 / (h * h) * (sk * sk + sl * sl);
  }

  /// Applies the Fourier multiplier m(lam) mode by mode. m(0) is evaluated for
  /// the constant mode, so callers decide what happens there.
  template <class Multiplier>
  CellField apply_multiplier(const CellField& in, Multiplier&& m) const {
    check_grid(in.grid());
    Impl& w = *impl_;
    std::lock_guard lock(w.mutex);
    std::copy(in.values().begin(), in.values().end(), w.real.begin());
    fftw_execute(w.forward);
    const double scale = 1.0 / static_cast<double>(w.grid.size());
    for (std::size_t k = 0; k < w.lam.size(); ++k) {
      const double factor = m(w.lam[k]) * scale;
      w.spec[k][0] *= factor;
      w.spec[k][1] *= factor;
    }
    fftw_execute(w.backward);
    CellField out(w.grid);
    std::copy(w.real.begin(), w.real.end(), out.values().begin());
    return out;
  }

  /// Forward + inverse transform; identity up to roundoff.
  CellField round_trip(const CellField& in) const {
    return apply_multiplier(in, [](double) { return 1.0; });
  }

 private:
  struct Impl {
    explicit Impl(const GridSpec& g) : grid(g) {
      const int n = g.n();
      const int nh = n / 2 + 1;
      real.resize(g.size());
      spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n * nh));
      lam.resize(static_cast<std::size_t>(n) * nh);
      const double h = g.spacing();
      for (int k = 0; k < n; ++k) {
        const double sk = std::sin(std::numbers::pi * k / n);
        for (int l = 0; l < nh; ++l) {
          const double sl = std::sin(std::numbers::pi * l / n);
          lam[static_cast<std::size_t>(k) * nh + l] = 4.0 / (h * h) * (sk * sk + sl * sl);
        }
      }
      // Exact zero for the constant mode.
      lam[0] = 0.0;
      std::lock_guard lock(detail::fftw_planner_mutex());
      // FFTW_ESTIMATE keeps plan selection, and hence the bits, deterministic.
      forward = fftw_plan_dft_r2c_2d(n, n, real.data(), spec, FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_2d(n, n, spec, real.data(), FFTW_ESTIMATE);
    }
    ~Impl() {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(forward);
      fftw_destroy_plan(backward);
      fftw_free(spec);
    }
    Impl(const Impl&) = delete;
    Impl& operator=(const Impl&) = delete;

    GridSpec grid;
    std::vector<double> real;
    fftw_complex* spec = nullptr;
    std::vector<double> lam;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::mutex mutex;
  };

  void check_grid(const GridSpec& g) const {
    if (!(g == impl_->grid)) throw GridMismatch("field grid does not match workspace");
  }

  std::unique_ptr<Impl> impl_;
};

/// Default mean tolerance for inputs that must be mean-zero.
inline double default_mean_tol(const CellField& v) { return 1e-12 * norm_inf(v); }

inline void require_mean_zero(const CellField& v, std::optional<double> mean_tol = {}) {
  const double m = mean(v);
  const double tol = mean_tol.value_or(default_mean_tol(v));
  if (!(std::abs(m) <= tol)) throw NonZeroMean(m, tol);
}

/// T_h = (-Delta_h)^{-1} on mean-zero fields; the result is mean-zero.
inline CellField solve_T(const CellField& zeta, const SpectralWorkspace& ws,
                         std::optional<double> mean_tol = {}) {
  require_mean_zero(zeta, mean_tol);
  return ws.apply_multiplier(zeta, [](double lam) { return lam > 0.0 ? 1.0 / lam : 0.0; });
}

/// Solves d - s Delta_h d + s eps^2 Delta_h^2 d = r.
inline CellField solve_precond_4th(const CellField& r, double s, double eps,
                                   const SpectralWorkspace& ws) {
  if (!(s > 0.0)) throw InvalidParameter("preconditioner requires s > 0");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParameter("preconditioner requires 0 < eps <= 1");
  const double se2 = s * eps * eps;
  return ws.apply_multiplier(
      r, [s, se2](double lam) { return 1.0 / (1.0 + s * lam + se2 * lam * lam); });
}

/// Solves s lambda d - s Delta_h d + s eps^2 Delta_h^2 d + T_h d = r on the
/// mean-zero subspace.
inline CellField solve_precond_6th(const CellField& r, double s, double eps, double lambda,
                                   const SpectralWorkspace& ws,
                                   std::optional<double> mean_tol = {}) {
  if (!(s > 0.0)) throw InvalidParameter("preconditioner requires s > 0");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParameter("preconditioner requires 0 < eps <= 1");
  if (!(lambda >= 0.0)) throw InvalidParameter("preconditioner requires lambda >= 0");
  require_mean_zero(r, mean_tol);
  const double sl = s * lambda;
  const double se2 = s * eps * eps;
  return ws.apply_multiplier(r, [s, sl, se2](double lam) {
    return lam > 0.0 ? 1.0 / (sl + s * lam + se2 * lam * lam + 1.0 / lam) : 0.0;
  });
}

}  // namespace gridflow

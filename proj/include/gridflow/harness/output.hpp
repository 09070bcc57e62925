#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gridflow/errors.hpp"
#include "gridflow/field_io.hpp"
#include "gridflow/harness/complexity.hpp"
#include "gridflow/harness/convergence.hpp"
#include "gridflow/models.hpp"

namespace gridflow {

/// Shortest round-trip decimal, so reruns produce identical bytes.
inline std::string csv_number(double v) { return detail::format_double(v); }

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  return os;
}

// ---- least-squares power laws ----------------------------------------------

struct SlopeFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  int samples = 0;
};

/// Fits log y = a + b log t over samples with t in [t_lo, t_hi] and y > 0.
inline SlopeFit fit_loglog_slope(const std::vector<double>& t, const std::vector<double>& y,
                                 double t_lo, double t_hi) {
  if (t.size() != y.size()) throw InvalidParameter("slope fit needs equal-length series");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] >= t_lo && t[k] <= t_hi && t[k] > 0.0 && y[k] > 0.0)) continue;
    const double lx = std::log(t[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  SlopeFit fit;
  fit.samples = m;
  if (m < 2) return fit;
  const double mx = sx / m, my = sy / m;
  const double var = sxx / m - mx * mx;
  if (!(var > 0.0)) return fit;
  fit.slope = (sxy / m - mx * my) / var;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

// ---- CSV writers -----------------------------------------------------------

inline void write_timeseries_header(std::ostream& os) {
  os << "step,t,energy,roughness,iters,wall_ms\n";
}

inline void write_timeseries_row(std::ostream& os, const EvolutionRecord& r) {
  os << r.step << ',' << csv_number(r.time) << ',' << csv_number(r.energy) << ','
     << csv_number(r.roughness) << ',' << r.solver_iters << ',' << csv_number(r.wall_ms) << '\n';
}

inline void write_rate_table(std::ostream& os, const std::vector<RateTableRow>& rows) {
  os << "h_c,h_f,cauchy_norm,rate,avg_iters,cpu_s\n";
  for (const auto& r : rows) {
    os << csv_number(r.h_c) << ',' << csv_number(r.h_f) << ',' << csv_number(r.cauchy_norm) << ','
       << (r.rate ? csv_number(*r.rate) : std::string()) << ',' << csv_number(r.avg_iters) << ','
       << csv_number(r.cpu_s) << '\n';
  }
}

inline void write_trace(std::ostream& os, const ComplexityTrace& t) {
  os << "k,gamma\n";
  for (std::size_t k = 0; k < t.gamma.size(); ++k) os << k << ',' << csv_number(t.gamma[k]) << '\n';
}

inline void write_complexity_summary(std::ostream& os, const std::vector<ComplexityTrace>& ts) {
  os << "n,eps,s,p,iterations,reached_tol\n";
  for (const auto& t : ts) {
    os << t.params.n << ',' << csv_number(t.params.eps) << ',' << csv_number(t.params.s) << ','
       << csv_number(t.params.p) << ',' << t.iterations << ',' << (t.reached_tol ? 1 : 0) << '\n';
  }
}

}  // namespace gridflow

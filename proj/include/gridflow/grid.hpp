#pragma once

// Staggered periodic grid on the square (0, L)^2.
//
// Storage is 0-based, row-major with x as the first axis: value (i, j) sits at
// offset i * n + j. Logical cell index i + 1 of the usual 1-based convention
// corresponds to storage index i, so a cell center lies at x = (i + 1/2) h.
// Vertices and edges carry the "+1/2" offset: vertex (i, j) sits at
// ((i + 1) h, (j + 1) h), between cells i and i + 1 in each direction.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gridflow/errors.hpp"

namespace gridflow {

class GridSpec {
 public:
  GridSpec(int n, double length) : n_(n), length_(length), h_(length / n) {
    if (n < 4) throw InvalidParameter("grid needs at least 4 cells per axis");
    if (!(length > 0.0) || !std::isfinite(length))
      throw InvalidParameter("domain length must be positive and finite");
  }

  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return h_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }
  /// Cell-center coordinate for storage index i.
  double center(int i) const noexcept { return (i + 0.5) * h_; }
  /// Vertex / edge coordinate for storage index i.
  double face(int i) const noexcept { return (i + 1.0) * h_; }

  int wrap(int i) const noexcept {
    const int r = i % n_;
    return r < 0 ? r + n_ : r;
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  int n_;
  double length_;
  double h_;
};

namespace location {
struct Cell {
  static constexpr double x_offset = 0.5;
  static constexpr double y_offset = 0.5;
};
struct Vertex {
  static constexpr double x_offset = 1.0;
  static constexpr double y_offset = 1.0;
};
struct EdgeEW {
  static constexpr double x_offset = 1.0;
  static constexpr double y_offset = 0.5;
};
struct EdgeNS {
  static constexpr double x_offset = 0.5;
  static constexpr double y_offset = 1.0;
};
}  // namespace location

/// Scalar grid function living at one of the four staggered locations.
template <class Location>
class Field {
 public:
  using location_type = Location;

  explicit Field(const GridSpec& grid, double value = 0.0)
      : grid_(grid), values_(grid.size(), value) {}

  Field(const GridSpec& grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw GridMismatch("value count does not match grid size");
  }

  /// Samples fn(x, y) at this location's points.
  template <class Fn>
    requires std::invocable<Fn, double, double>
  static Field sample(const GridSpec& grid, Fn&& fn) {
    Field out(grid);
    const double h = grid.spacing();
    for (int i = 0; i < grid.n(); ++i) {
      const double x = (i + Location::x_offset) * h;
      for (int j = 0; j < grid.n(); ++j)
        out(i, j) = fn(x, (j + Location::y_offset) * h);
    }
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  int n() const noexcept { return grid_.n(); }

  double& operator()(int i, int j) noexcept { return values_[index(i, j)]; }
  double operator()(int i, int j) const noexcept { return values_[index(i, j)]; }

  /// Access with periodic wrap for any integer indices.
  double periodic(int i, int j) const noexcept {
    return values_[index(grid_.wrap(i), grid_.wrap(j))];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  Field& operator+=(const Field& o) {
    check_same_grid(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same_grid(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }
  Field& operator+=(double c) noexcept {
    for (auto& v : values_) v += c;
    return *this;
  }
  Field& operator-=(double c) noexcept { return *this += -c; }
  Field& operator*=(double c) noexcept {
    for (auto& v : values_) v *= c;
    return *this;
  }

  /// this += a * x
  Field& axpy(double a, const Field& x) {
    check_same_grid(x);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * x.values_[k];
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double c, Field a) noexcept { return a *= c; }
  friend Field operator*(Field a, double c) noexcept { return a *= c; }
  friend Field operator-(Field a) noexcept { return a *= -1.0; }

  friend bool operator==(const Field& a, const Field& b) {
    return a.grid_ == b.grid_ && a.values_ == b.values_;
  }

  void check_same_grid(const Field& o) const {
    if (!(grid_ == o.grid_)) throw GridMismatch("fields live on different grids");
  }
  template <class Other>
  void check_same_grid(const Field<Other>& o) const {
    if (!(grid_ == o.grid())) throw GridMismatch("fields live on different grids");
  }

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(grid_.n()) +
           static_cast<std::size_t>(j);
  }

  GridSpec grid_;
  std::vector<double> values_;
};

using CellField = Field<location::Cell>;
using VertexField = Field<location::Vertex>;
using EdgeFieldEW = Field<location::EdgeEW>;
using EdgeFieldNS = Field<location::EdgeNS>;

struct VertexVectorField {
  VertexField x;
  VertexField y;
};

namespace detail {

// Forward differences/averages move +1/2 along an axis, backward ones -1/2.
template <class From> struct forward_x;
template <> struct forward_x<location::Cell> { using type = location::EdgeEW; };
template <> struct forward_x<location::EdgeNS> { using type = location::Vertex; };
template <class From> struct forward_y;
template <> struct forward_y<location::Cell> { using type = location::EdgeNS; };
template <> struct forward_y<location::EdgeEW> { using type = location::Vertex; };
template <class From> struct backward_x;
template <> struct backward_x<location::EdgeEW> { using type = location::Cell; };
template <> struct backward_x<location::Vertex> { using type = location::EdgeNS; };
template <class From> struct backward_y;
template <> struct backward_y<location::EdgeNS> { using type = location::Cell; };
template <> struct backward_y<location::Vertex> { using type = location::EdgeEW; };

// out(i, j) = a * in(i + dx, j + dy) + b * in(i, j), dx, dy in {-1, 0, 1}.
template <class To, class From>
Field<To> two_point(const Field<From>& in, int dx, int dy, double a, double b) {
  const int n = in.n();
  Field<To> out(in.grid());
  for (int i = 0; i < n; ++i) {
    const int is = in.grid().wrap(i + dx);
    for (int j = 0; j < n; ++j) {
      const int js = in.grid().wrap(j + dy);
      out(i, j) = a * in(is, js) + b * in(i, j);
    }
  }
  return out;
}

inline int next(int i, int n) noexcept { return i + 1 == n ? 0 : i + 1; }
inline int prev(int i, int n) noexcept { return i == 0 ? n - 1 : i - 1; }

}  // namespace detail

// D_x, A_x: Cell -> EdgeEW and EdgeNS -> Vertex.
template <class From>
Field<typename detail::forward_x<From>::type> forward_diff_x(const Field<From>& v) {
  const double ih = 1.0 / v.grid().spacing();
  return detail::two_point<typename detail::forward_x<From>::type>(v, 1, 0, ih, -ih);
}
template <class From>
Field<typename detail::forward_x<From>::type> forward_avg_x(const Field<From>& v) {
  return detail::two_point<typename detail::forward_x<From>::type>(v, 1, 0, 0.5, 0.5);
}
// D_y, A_y: Cell -> EdgeNS and EdgeEW -> Vertex.
template <class From>
Field<typename detail::forward_y<From>::type> forward_diff_y(const Field<From>& v) {
  const double ih = 1.0 / v.grid().spacing();
  return detail::two_point<typename detail::forward_y<From>::type>(v, 0, 1, ih, -ih);
}
template <class From>
Field<typename detail::forward_y<From>::type> forward_avg_y(const Field<From>& v) {
  return detail::two_point<typename detail::forward_y<From>::type>(v, 0, 1, 0.5, 0.5);
}
// d_x, a_x: EdgeEW -> Cell and Vertex -> EdgeNS.
template <class From>
Field<typename detail::backward_x<From>::type> backward_diff_x(const Field<From>& v) {
  const double ih = 1.0 / v.grid().spacing();
  return detail::two_point<typename detail::backward_x<From>::type>(v, -1, 0, -ih, ih);
}
template <class From>
Field<typename detail::backward_x<From>::type> backward_avg_x(const Field<From>& v) {
  return detail::two_point<typename detail::backward_x<From>::type>(v, -1, 0, 0.5, 0.5);
}
// d_y, a_y: EdgeNS -> Cell and Vertex -> EdgeEW.
template <class From>
Field<typename detail::backward_y<From>::type> backward_diff_y(const Field<From>& v) {
  const double ih = 1.0 / v.grid().spacing();
  return detail::two_point<typename detail::backward_y<From>::type>(v, 0, -1, -ih, ih);
}
template <class From>
Field<typename detail::backward_y<From>::type> backward_avg_y(const Field<From>& v) {
  return detail::two_point<typename detail::backward_y<From>::type>(v, 0, -1, 0.5, 0.5);
}

inline EdgeFieldEW diff_x_cell_to_ew(const CellField& v) { return forward_diff_x(v); }
inline EdgeFieldNS diff_y_cell_to_ns(const CellField& v) { return forward_diff_y(v); }

/// Collocated center-to-vertex gradient (both components at vertices).
inline VertexVectorField grad_v(const CellField& v) {
  const int n = v.n();
  const double c = 0.5 / v.grid().spacing();
  VertexVectorField g{VertexField(v.grid()), VertexField(v.grid())};
  for (int i = 0; i < n; ++i) {
    const int ip = detail::next(i, n);
    for (int j = 0; j < n; ++j) {
      const int jp = detail::next(j, n);
      const double a = v(i, j), b = v(ip, j), cc = v(i, jp), d = v(ip, jp);
      g.x(i, j) = c * (d - cc + b - a);
      g.y(i, j) = c * (d - b + cc - a);
    }
  }
  return g;
}

/// Vertex-to-center divergence: dfrak_x(vx) + dfrak_y(vy).
inline CellField div_v(const VertexField& vx, const VertexField& vy) {
  vx.check_same_grid(vy);
  const int n = vx.n();
  const double c = 0.5 / vx.grid().spacing();
  CellField out(vx.grid());
  for (int i = 0; i < n; ++i) {
    const int im = detail::prev(i, n);
    for (int j = 0; j < n; ++j) {
      const int jm = detail::prev(j, n);
      out(i, j) = c * (vx(i, j) - vx(im, j) + vx(i, jm) - vx(im, jm)) +
                  c * (vy(i, j) - vy(i, jm) + vy(im, j) - vy(im, jm));
    }
  }
  return out;
}

/// Standard 5-point Laplacian.
inline CellField laplacian(const CellField& v) {
  const int n = v.n();
  const double ih2 = 1.0 / (v.grid().spacing() * v.grid().spacing());
  CellField out(v.grid());
  for (int i = 0; i < n; ++i) {
    const int ip = detail::next(i, n), im = detail::prev(i, n);
    for (int j = 0; j < n; ++j) {
      const int jp = detail::next(j, n), jm = detail::prev(j, n);
      out(i, j) = ih2 * (v(ip, j) + v(im, j) + v(i, jp) + v(i, jm) - 4.0 * v(i, j));
    }
  }
  return out;
}

inline CellField bilaplacian(const CellField& v) { return laplacian(laplacian(v)); }

/// Diagonal-stencil Laplacian induced by the vertex gradient.
inline CellField skew_laplacian(const CellField& v) {
  const int n = v.n();
  const double c = 0.5 / (v.grid().spacing() * v.grid().spacing());
  CellField out(v.grid());
  for (int i = 0; i < n; ++i) {
    const int ip = detail::next(i, n), im = detail::prev(i, n);
    for (int j = 0; j < n; ++j) {
      const int jp = detail::next(j, n), jm = detail::prev(j, n);
      out(i, j) = c * (v(ip, jp) + v(im, jp) + v(ip, jm) + v(im, jm) - 4.0 * v(i, j));
    }
  }
  return out;
}

namespace detail {
// |g|^e at a vertex given |g|^2, with 0^0 = 1.
inline double magnitude_pow(double sq, double exponent) noexcept {
  if (exponent == 0.0) return 1.0;
  if (exponent == 1.0) return sq;
  if (exponent == 2.0) return sq * sq;
  return std::pow(sq, exponent);
}
}  // namespace detail

/// Discrete p-Laplacian, div_v(|grad_v u|^{p-2} grad_v u), for p >= 2.
inline CellField p_laplacian(const CellField& v, double p) {
  if (!(p >= 2.0)) throw InvalidParameter("p-Laplacian requires p >= 2");
  auto g = grad_v(v);
  const double e = 0.5 * (p - 2.0);
  auto gx = g.x.values();
  auto gy = g.y.values();
  for (std::size_t k = 0; k < gx.size(); ++k) {
    const double r = detail::magnitude_pow(gx[k] * gx[k] + gy[k] * gy[k], e);
    gx[k] *= r;
    gy[k] *= r;
  }
  return div_v(g.x, g.y);
}

// ---- inner products and norms ----------------------------------------------

/// h^2-weighted sum of the pointwise product. For vertex and edge fields this
/// is the averaged-to-centers form summed over cells, which under periodic
/// wrap counts every point exactly once.
template <class Loc>
double inner_product(const Field<Loc>& a, const Field<Loc>& b) {
  a.check_same_grid(b);
  const auto av = a.values();
  const auto bv = b.values();
  double sum = 0.0;
  for (std::size_t k = 0; k < av.size(); ++k) sum += av[k] * bv[k];
  const double h = a.grid().spacing();
  return h * h * sum;
}

inline double ip_cell(const CellField& a, const CellField& b) { return inner_product(a, b); }
inline double ip_vertex(const VertexField& a, const VertexField& b) { return inner_product(a, b); }
inline double ip_edge_ew(const EdgeFieldEW& a, const EdgeFieldEW& b) { return inner_product(a, b); }
inline double ip_edge_ns(const EdgeFieldNS& a, const EdgeFieldNS& b) { return inner_product(a, b); }

inline double norm2(const CellField& v) { return std::sqrt(inner_product(v, v)); }

inline double normp(const CellField& v, double p) {
  double sum = 0.0;
  for (double x : v.values()) sum += std::pow(std::abs(x), p);
  const double h = v.grid().spacing();
  return std::pow(h * h * sum, 1.0 / p);
}

inline double norm_inf(const CellField& v) {
  double m = 0.0;
  for (double x : v.values()) m = std::max(m, std::abs(x));
  return m;
}

/// ||grad_v v||_p^p, the vertex-based gradient norm raised to p.
inline double grad_norm_p_pow(const CellField& v, double p) {
  const auto g = grad_v(v);
  const auto gx = g.x.values();
  const auto gy = g.y.values();
  const double e = 0.5 * p;
  double sum = 0.0;
  for (std::size_t k = 0; k < gx.size(); ++k)
    sum += detail::magnitude_pow(gx[k] * gx[k] + gy[k] * gy[k], e);
  const double h = v.grid().spacing();
  return h * h * sum;
}

inline double grad_norm_p(const CellField& v, double p) {
  return std::pow(grad_norm_p_pow(v, p), 1.0 / p);
}

/// Edge-based ||grad_h v||_2 from the D_x / D_y differences.
inline double grad_norm_2_edge(const CellField& v) {
  const auto dx = forward_diff_x(v);
  const auto dy = forward_diff_y(v);
  return std::sqrt(inner_product(dx, dx) + inner_product(dy, dy));
}

inline double mean(const CellField& v) {
  double sum = 0.0;
  for (double x : v.values()) sum += x;
  return sum / static_cast<double>(v.grid().size());
}

inline CellField project_mean_zero(CellField v) {
  v -= mean(v);
  return v;
}

}  // namespace gridflow

#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace gridflow {

/// Dense real polynomial, coefficients in ascending degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) {}

  std::size_t degree() const noexcept { return c_.empty() ? 0 : c_.size() - 1; }
  const std::vector<double>& coefficients() const noexcept { return c_; }
  double coefficient(std::size_t k) const noexcept { return k < c_.size() ? c_[k] : 0.0; }
  double& operator[](std::size_t k) {
    if (k >= c_.size()) c_.resize(k + 1, 0.0);
    return c_[k];
  }

  double operator()(double x) const noexcept {
    double v = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
    return v;
  }

  double derivative(double x) const noexcept {
    double v = 0.0;
    for (std::size_t k = c_.size(); k-- > 1;) v = v * x + static_cast<double>(k) * c_[k];
    return v;
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    std::vector<double> out(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(out));
  }

 private:
  std::vector<double> c_;
};

}  // namespace gridflow

#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace gridflow {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Two fields (or a field and a workspace) live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A field required to be mean-zero is not, beyond the configured tolerance.
/// Usually means mass conservation was broken upstream.
class NonZeroMean : public Error {
 public:
  NonZeroMean(double mean, double tol)
      : Error("field mean " + sci(mean) + " exceeds tolerance " + sci(tol)),
        mean_(mean),
        tol_(tol) {}

  double mean() const noexcept { return mean_; }
  double tolerance() const noexcept { return tol_; }

 private:
  static std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }
  double mean_;
  double tol_;
};

class InvalidE0 : public Error {
 public:
  using Error::Error;
};

/// The line-search derivative at zero step is not negative.
class NotDescent : public Error {
 public:
  using Error::Error;
};

/// Bracket doubling ran past its cap; signals NaN or overflow upstream.
class NoBracket : public Error {
 public:
  using Error::Error;
};

/// A time-stepping driver could not converge a nonlinear solve.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridflow

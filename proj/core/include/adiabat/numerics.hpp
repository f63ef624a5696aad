#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace adiabat::numerics {

/// Adaptive Gauss-Kronrod (7/15) quadrature of f over [a,b]. Succeeds when the
/// error estimate is below max(abs_tol, rel_tol * L1 norm); otherwise throws
/// QuadratureFailure.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, double abs_tol = 1e-300);

/// Root of f in [lo, hi] by TOMS 748. f(lo) and f(hi) must differ in sign
/// (or one must vanish), otherwise NoBracket is thrown.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double x_tol = 0.0, int max_iter = 200);

/// Newton iteration kept inside a sign-change bracket [lo, hi] (bisection when
/// a Newton step escapes or stalls). `f_df` returns {f, f'}. Stops when
/// |f| <= f_tol or the bracket collapses to a few ulps.
/// Throws OutOfRange when f(lo) and f(hi) have the same sign.
double newton_bracketed(const std::function<std::pair<double, double>(double)>& f_df, double lo,
                        double hi, double guess, double f_tol, int max_iter = 200);

/// Shape-preserving cubic Hermite interpolant on strictly increasing nodes.
///
/// With nodal slopes supplied (usually exact analytic derivatives), the slopes
/// are passed through the Fritsch-Carlson limiter so that monotone data stays
/// monotone; without them the PCHIP slopes are used.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes);

  /// Throws DomainError outside [front, back] (a few ulps of slack allowed).
  double operator()(double x) const;
  double derivative(double x) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  std::span<const double> nodes() const { return x_; }
  std::span<const double> values() const { return y_; }
  std::size_t size() const { return x_.size(); }
  bool empty() const { return x_.empty(); }

 private:
  double clamp(double x) const;
  std::vector<double> x_, y_;
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Bicubic Hermite interpolation on a tensor grid from nodal values, both
/// first partials and the mixed partial. Node (i, j) is stored at i * ny + j.
class BicubicHermite {
 public:
  BicubicHermite() = default;
  BicubicHermite(std::vector<double> x, std::vector<double> y, std::vector<double> f,
                 std::vector<double> fx, std::vector<double> fy, std::vector<double> fxy);
  double operator()(double x, double y) const;
  std::size_t nx() const { return x_.size(); }
  std::size_t ny() const { return y_.size(); }

 private:
  std::vector<double> x_, y_, f_, fx_, fy_, fxy_;
};

struct OdeOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  std::size_t max_steps = 200000;
};

/// Scalar ODE dy/dt = rhs(t, y) from t0 to t1 with an embedded
/// Dormand-Prince 5(4) pair, landing exactly on t1.
///
/// `valid(t, y)` marks the admissible region. A step that ends outside it
/// (or whose right-hand side throws DomainError/OutOfRange) is retried with a
/// halved step; once the step collapses the integrator throws LeftDomain
/// carrying the last admissible (t, y). `observer` sees every accepted step.
/// Throws StiffnessFailure when max_steps is exhausted.
double integrate_ode(const std::function<double(double, double)>& rhs, double t0, double y0,
                     double t1, const OdeOptions& opts = {},
                     const std::function<bool(double, double)>& valid = {},
                     const std::function<void(double, double)>& observer = {});

}  // namespace adiabat::numerics

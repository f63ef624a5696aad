#include "adiabat/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <variant>

#include <boost/math/interpolators/cubic_hermite.hpp>
// Boost 1.74 pchip.hpp calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include "adiabat/error.hpp"

namespace adiabat::numerics {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

namespace {

struct Panel {
  double a, b, value, error, l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gauss_kronrod_panel(const std::function<double(double)>& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  static const auto& x = GK::abscissa();
  static const auto& wk = GK::weights();
  static const auto& wg = boost::math::quadrature::gauss<double, 7>::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fc = f(mid);
  double kronrod = wk[0] * fc;
  double gauss = wg[0] * fc;
  double l1 = wk[0] * std::abs(fc);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fl = f(mid - half * x[i]);
    const double fr = f(mid + half * x[i]);
    kronrod += wk[i] * (fl + fr);
    l1 += wk[i] * (std::abs(fl) + std::abs(fr));
    if (i % 2 == 0) gauss += wg[i / 2] * (fl + fr);
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half), l1 * std::abs(half)};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double abs_tol) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, rel_tol, abs_tol);
  // Globally adaptive Gauss-Kronrod (7, 15): bisect the panel with the
  // largest error estimate until the summed estimate meets the tolerance.
  constexpr int kMaxPanels = 4000;
  std::priority_queue<Panel> panels;
  Panel first = gauss_kronrod_panel(f, a, b);
  double value = first.value, error = first.error, l1 = first.l1;
  panels.push(first);
  auto met = [&] {
    return error <= std::max({abs_tol, rel_tol * std::abs(value), 50 * kEps * l1});
  };
  while (!met()) {
    if (static_cast<int>(panels.size()) >= kMaxPanels) {
      throw QuadratureFailure("quadrature tolerance not met on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    }
    const Panel p = panels.top();
    panels.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      throw QuadratureFailure("quadrature interval exhausted near " + std::to_string(p.a));
    }
    const Panel left = gauss_kronrod_panel(f, p.a, m);
    const Panel right = gauss_kronrod_panel(f, m, p.b);
    value += left.value + right.value - p.value;
    error += left.error + right.error - p.error;
    l1 += left.l1 + right.l1 - p.l1;
    panels.push(left);
    panels.push(right);
  }
  if (!std::isfinite(value)) throw QuadratureFailure("non-finite quadrature result");
  return value;
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double x_tol,
                 int max_iter) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0) == (fhi < 0)) throw NoBracket("root not bracketed");
  auto done = [x_tol](double a, double b) {
    return std::abs(b - a) <= std::max(x_tol, 4 * kEps * std::max(std::abs(a), std::abs(b)));
  };
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
  if (iters >= static_cast<std::uintmax_t>(max_iter) && !done(a, b)) {
    throw NonConvergence("root finder did not converge");
  }
  return 0.5 * (a + b);
}

double newton_bracketed(const std::function<std::pair<double, double>(double)>& f_df, double lo,
                        double hi, double guess, double f_tol, int max_iter) {
  const double flo = f_df(lo).first;
  if (flo == 0.0) return lo;
  const double fhi = f_df(hi).first;
  if (fhi == 0.0) return hi;
  if ((flo < 0) == (fhi < 0)) throw OutOfRange("target outside bracket");

  double xl = flo < 0 ? lo : hi;  // f(xl) < 0
  double xh = flo < 0 ? hi : lo;  // f(xh) > 0
  double x = (std::isfinite(guess) && guess > std::min(lo, hi) && guess < std::max(lo, hi))
                 ? guess
                 : 0.5 * (lo + hi);
  double dx_old = std::abs(hi - lo);
  double dx = dx_old;
  auto [fx, dfx] = f_df(x);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fx) <= f_tol) return x;
    if (fx < 0) xl = x; else xh = x;
    const double newton = dfx != 0.0 ? x - fx / dfx : std::numeric_limits<double>::quiet_NaN();
    const bool inside = std::isfinite(newton) && newton > std::min(xl, xh) &&
                        newton < std::max(xl, xh);
    if (!inside || std::abs(2.0 * fx) > std::abs(dx_old * dfx)) {
      dx_old = dx;
      dx = 0.5 * (xh - xl);
      x = xl + dx;
    } else {
      dx_old = dx;
      dx = fx / dfx;
      x = newton;
    }
    if (std::abs(xh - xl) <= 4 * kEps * std::max(std::abs(xl), std::abs(xh))) return x;
    std::tie(fx, dfx) = f_df(x);
  }
  if (std::abs(fx) <= f_tol) return x;
  throw NonConvergence("bracketed Newton did not converge");
}

// ---------------------------------------------------------------------------

struct MonotoneCubic::Impl {
  using Hermite = boost::math::interpolators::cubic_hermite<std::vector<double>>;
  using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
  std::variant<Hermite, Pchip> interp;
};

namespace {

void check_nodes(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2 || x.size() != y.size()) throw Error("interpolation needs >= 2 matching nodes");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw Error("interpolation nodes must be strictly increasing");
  }
}

// Fritsch-Carlson: keep each interval's slope pair inside the monotonicity
// circle of radius 3.
void limit_slopes(const std::vector<double>& x, const std::vector<double>& y,
                  std::vector<double>& m) {
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double delta = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
    if (delta == 0.0) {
      m[k] = m[k + 1] = 0.0;
      continue;
    }
    double a = m[k] / delta;
    double b = m[k + 1] / delta;
    if (a < 0) { m[k] = 0; a = 0; }
    if (b < 0) { m[k + 1] = 0; b = 0; }
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      m[k] = tau * a * delta;
      m[k + 1] = tau * b * delta;
    }
  }
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y) {
  check_nodes(x, y);
  x_ = x;
  y_ = y;
  auto impl = std::make_shared<Impl>(Impl{Impl::Hermite({0.0, 1.0}, {0.0, 0.0}, {0.0, 0.0})});
  if (x.size() >= 4) {
    impl->interp.emplace<Impl::Pchip>(std::move(x), std::move(y));
  } else {
    std::vector<double> m(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i + 1 == x.size() ? i : i + 1;
      m[i] = (y[b] - y[a]) / (x[b] - x[a]);
    }
    limit_slopes(x, y, m);
    impl->interp.emplace<Impl::Hermite>(std::move(x), std::move(y), std::move(m));
  }
  impl_ = std::move(impl);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y,
                             std::vector<double> slopes) {
  check_nodes(x, y);
  if (slopes.size() != x.size()) throw Error("slope count mismatch");
  limit_slopes(x, y, slopes);
  x_ = x;
  y_ = y;
  impl_ = std::make_shared<Impl>(
      Impl{Impl::Hermite(std::move(x), std::move(y), std::move(slopes))});
}

double MonotoneCubic::clamp(double x) const {
  if (x_.empty()) throw Error("empty interpolant");
  const double slack = 1e-12 * std::max({1.0, std::abs(x_.front()), std::abs(x_.back())});
  if (x < x_.front()) {
    if (x < x_.front() - slack) throw DomainError("interpolation below table range");
    return x_.front();
  }
  if (x > x_.back()) {
    if (x > x_.back() + slack) throw DomainError("interpolation above table range");
    return x_.back();
  }
  return x;
}

double MonotoneCubic::operator()(double x) const {
  const double xc = clamp(x);
  return std::visit([xc](const auto& f) { return f(xc); }, impl_->interp);
}

double MonotoneCubic::derivative(double x) const {
  const double xc = clamp(x);
  return std::visit([xc](const auto& f) { return f.prime(xc); }, impl_->interp);
}

// ---------------------------------------------------------------------------

BicubicHermite::BicubicHermite(std::vector<double> x, std::vector<double> y, std::vector<double> f,
                               std::vector<double> fx, std::vector<double> fy,
                               std::vector<double> fxy)
    : x_(std::move(x)),
      y_(std::move(y)),
      f_(std::move(f)),
      fx_(std::move(fx)),
      fy_(std::move(fy)),
      fxy_(std::move(fxy)) {
  const std::size_t n = x_.size() * y_.size();
  if (x_.size() < 2 || y_.size() < 2 || f_.size() != n || fx_.size() != n || fy_.size() != n ||
      fxy_.size() != n) {
    throw Error("bicubic table shape mismatch");
  }
}

double BicubicHermite::operator()(double x, double y) const {
  auto cell = [](const std::vector<double>& g, double v) -> std::size_t {
    const double slack = 1e-12 * std::max({1.0, std::abs(g.front()), std::abs(g.back())});
    if (v < g.front() - slack || v > g.back() + slack) throw DomainError("outside 2-D table");
    auto it = std::upper_bound(g.begin(), g.end(), v);
    std::size_t i = it == g.begin() ? 0 : static_cast<std::size_t>(it - g.begin()) - 1;
    return std::min(i, g.size() - 2);
  };
  const std::size_t i = cell(x_, x);
  const std::size_t j = cell(y_, y);
  const double hx = x_[i + 1] - x_[i];
  const double hy = y_[j + 1] - y_[j];
  const double t = std::clamp((x - x_[i]) / hx, 0.0, 1.0);
  const double u = std::clamp((y - y_[j]) / hy, 0.0, 1.0);
  auto basis = [](double s) {
    const double s2 = s * s, s3 = s2 * s;
    return std::array<double, 4>{2 * s3 - 3 * s2 + 1, -2 * s3 + 3 * s2, s3 - 2 * s2 + s, s3 - s2};
  };
  const auto bt = basis(t);
  const auto bu = basis(u);
  const std::size_t ny = y_.size();
  double r = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const std::size_t k = (i + a) * ny + (j + b);
      r += f_[k] * bt[a] * bu[b] + fx_[k] * hx * bt[2 + a] * bu[b] +
           fy_[k] * hy * bt[a] * bu[2 + b] + fxy_[k] * hx * hy * bt[2 + a] * bu[2 + b];
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

double integrate_ode(const std::function<double(double, double)>& rhs, double t0, double y0,
                     double t1, const OdeOptions& opts,
                     const std::function<bool(double, double)>& valid,
                     const std::function<void(double, double)>& observer) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 1>;
  if (observer) observer(t0, y0);
  if (t0 == t1) return y0;

  auto system = [&rhs](const State& x, State& dxdt, double t) { dxdt[0] = rhs(t, x[0]); };
  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(opts.abs_tol, opts.rel_tol);

  const double span = t1 - t0;
  const double dir = span > 0 ? 1.0 : -1.0;
  const double min_step = 1e-14 * std::max(std::abs(span), std::abs(t0));
  double t = t0;
  State x{y0};
  State dxdt{rhs(t0, y0)};
  double dt = span / 64.0;
  bool bisecting = false;

  for (std::size_t steps = 0; dir * (t1 - t) > 0; ++steps) {
    if (steps >= opts.max_steps) throw StiffnessFailure("ODE step budget exhausted");
    bool landing = false;
    if (dir * (t + dt - t1) >= 0) {
      dt = t1 - t;
      landing = true;
    }
    double t_try = t;
    double dt_try = dt;
    State out{};
    State dout{};
    bool admissible = true;
    ode::controlled_step_result res = ode::fail;
    try {
      res = stepper.try_step(system, x, dxdt, t_try, out, dout, dt_try);
    } catch (const DomainError&) {
      admissible = false;
    } catch (const OutOfRange&) {
      admissible = false;
    }
    if (admissible && res == ode::fail) {
      dt = dt_try;
      continue;
    }
    if (admissible) {
      admissible = std::isfinite(out[0]) && (!valid || valid(t_try, out[0]));
    }
    if (!admissible) {
      dt *= 0.5;
      bisecting = true;
      if (std::abs(dt) < min_step) {
        throw LeftDomain("integration path left the admissible region", t, x[0]);
      }
      continue;
    }
    t = landing ? t1 : t_try;
    x = out;
    dxdt = dout;
    if (observer) observer(t, x[0]);
    dt = bisecting ? dir * std::min(std::abs(dt_try), 2.0 * std::abs(dt)) : dt_try;
  }
  return x[0];
}

}  // namespace adiabat::numerics

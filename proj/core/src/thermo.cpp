#include "adiabat/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "adiabat/error.hpp"
#include "adiabat/parallel.hpp"

namespace adiabat {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

double hermite(double xa, double xb, double ya, double yb, double ma, double mb, double x) {
  const double h = xb - xa;
  const double t = (x - xa) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * ya + (t3 - 2 * t2 + t) * h * ma + (-2 * t3 + 3 * t2) * yb +
         (t3 - t2) * h * mb;
}

std::vector<double> spaced(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  const bool geometric = lo > 0 && hi / lo > 4.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = geometric ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

/// Grid over [lo, hi] containing `ref` as a node.
std::vector<double> grid_through(double lo, double hi, double ref, std::size_t per_side) {
  std::vector<double> x;
  if (ref > lo) {
    x = spaced(lo, ref, per_side);
    x.pop_back();
  }
  if (ref < hi) {
    auto right = spaced(ref, hi, per_side);
    x.insert(x.end(), right.begin(), right.end());
  } else {
    x.push_back(ref);
  }
  return x;
}

struct Table {
  std::vector<double> x, y, m;
};

/// Adaptive table of Y(I(x)) with I(x) = int_ref^x f, slopes dY/dI * f.
/// Intervals are bisected until cubic Hermite midpoint error is below
/// tol * max(1, |y|).
template <class F, class Y, class DY>
Table cumulative_table(const F& f, double lo, double hi, double ref, const Y& y_of,
                       const DY& dy_di, const TableOptions& opts) {
  std::vector<double> x = grid_through(lo, hi, ref, 33);
  std::vector<double> integral(x.size(), 0.0);
  const auto ref_it = std::find(x.begin(), x.end(), ref);
  const std::size_t r = static_cast<std::size_t>(ref_it - x.begin());
  for (std::size_t k = r + 1; k < x.size(); ++k) {
    integral[k] = integral[k - 1] + numerics::integrate(f, x[k - 1], x[k], opts.quad_tol, 1e-300);
  }
  for (std::size_t k = r; k-- > 0;) {
    integral[k] = integral[k + 1] - numerics::integrate(f, x[k], x[k + 1], opts.quad_tol, 1e-300);
  }
  auto value = [&](std::size_t k) { return y_of(integral[k]); };
  auto slope = [&](double xi, double ii) { return dy_di(ii) * f(xi); };

  std::vector<double> y(x.size()), m(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    y[k] = value(k);
    m[k] = slope(x[k], integral[k]);
  }

  bool refined = true;
  while (refined && x.size() < opts.max_nodes) {
    refined = false;
    std::vector<double> nx, ni, ny, nm;
    nx.reserve(2 * x.size());
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
      nx.push_back(x[k]);
      ni.push_back(integral[k]);
      ny.push_back(y[k]);
      nm.push_back(m[k]);
      const double mid = 0.5 * (x[k] + x[k + 1]);
      if (!(mid > x[k] && mid < x[k + 1])) continue;
      const double i_mid = integral[k] + numerics::integrate(f, x[k], mid, opts.quad_tol, 1e-300);
      const double y_mid = y_of(i_mid);
      const double guess = hermite(x[k], x[k + 1], y[k], y[k + 1], m[k], m[k + 1], mid);
      if (std::abs(guess - y_mid) > opts.interp_tol * std::max(1.0, std::abs(y_mid)) &&
          nx.size() + (x.size() - k) < opts.max_nodes) {
        nx.push_back(mid);
        ni.push_back(i_mid);
        ny.push_back(y_mid);
        nm.push_back(slope(mid, i_mid));
        refined = true;
      }
    }
    nx.push_back(x.back());
    ni.push_back(integral.back());
    ny.push_back(y.back());
    nm.push_back(m.back());
    x = std::move(nx);
    integral = std::move(ni);
    y = std::move(ny);
    m = std::move(nm);
  }
  return {std::move(x), std::move(y), std::move(m)};
}

void require_in_domain(const SimpleSystem& sys, double theta, double v) {
  if (!sys.domain().contains(theta, v)) {
    throw DomainError("(theta=" + fmt(theta) + ", v=" + fmt(v) + ") outside domain of '" +
                      sys.id() + "'");
  }
}

}  // namespace

double planck_temperature(const SimpleSystem& sys, double theta, double v_probe, Anchor anchor,
                          double tol) {
  require_in_domain(sys, theta, v_probe);
  require_in_domain(sys, anchor.theta, v_probe);
  if (theta == anchor.theta) return anchor.temperature;
  const double exponent = numerics::integrate(
      [&](double t) { return sys.planck_integrand(t, v_probe); }, anchor.theta, theta, tol,
      1e-300);
  return anchor.temperature * std::exp(exponent);
}

// ---------------------------------------------------------------------------

TemperatureMap::TemperatureMap(std::string space, Anchor anchor, double v_probe,
                               numerics::MonotoneCubic table)
    : space_(std::move(space)), anchor_(anchor), v_probe_(v_probe), table_(std::move(table)) {}

double TemperatureMap::theta_for(double t) const {
  if (t < t_min() || t > t_max()) {
    throw OutOfRange("temperature " + fmt(t) + " outside [" + fmt(t_min()) + ", " +
                     fmt(t_max()) + "] of '" + space_ + "'");
  }
  return numerics::find_root([&](double theta) { return table_(theta) - t; }, table_.front(),
                             table_.back());
}

TemperatureMap build_temperature_map(const SimpleSystem& sys, const TableOptions& opts) {
  const Domain& d = sys.domain();
  const Anchor anchor{sys.spec().theta_ref, sys.anchor_temperature()};
  const double v_probe = sys.spec().v_ref;
  if (!(anchor.temperature > 0)) throw DomainError("anchor temperature must be positive");
  auto g = [&](double theta) { return sys.planck_integrand(theta, v_probe); };
  Table t = cumulative_table(
      g, d.theta_min, d.theta_max, anchor.theta,
      [&](double i) { return anchor.temperature * std::exp(i); },
      [&](double i) { return anchor.temperature * std::exp(i); }, opts);
  for (std::size_t k = 1; k < t.y.size(); ++k) {
    if (!(t.y[k] > t.y[k - 1])) {
      throw DomainError("absolute temperature not increasing near theta=" + fmt(t.x[k]) +
                        " in '" + sys.id() + "'");
    }
  }
  return TemperatureMap(sys.id(), anchor, v_probe,
                        numerics::MonotoneCubic(std::move(t.x), std::move(t.y), std::move(t.m)));
}

// ---------------------------------------------------------------------------

double EntropyFn::per_unit(double theta, double v) const {
  require_in_domain(*sys_, theta, v);
  const double chore = separable_ ? isochore_(theta) : coupled_(theta, v);
  return s_ref_ + isotherm_(v) + chore;
}

double EntropyFn::per_unit_energy(double u, double v) const {
  return per_unit(sys_->theta_from_energy(u, v), v);
}

double EntropyFn::of(const SimpleState& x) const {
  if (x.space != space_) throw Error("state of '" + x.space + "' given to entropy of '" + space_ + "'");
  return x.scale * (scale_a_ * per_unit_energy(x.u(), x.v()) + offset_b_);
}

EntropyFn derive_entropy(std::shared_ptr<const SimpleSystem> sys,
                         std::shared_ptr<const TemperatureMap> tmap, const TableOptions& opts) {
  if (tmap->space() != sys->id()) throw Error("temperature map belongs to another space");
  const Domain& d = sys->domain();
  const double theta0 = sys->spec().theta_ref;
  const double v0 = sys->spec().v_ref;
  const double t0 = (*tmap)(theta0);

  EntropyFn s;
  s.space_ = sys->id();
  s.sys_ = sys;
  s.tmap_ = tmap;
  s.s_ref_ = sys->spec().reference_entropy;
  s.separable_ = sys->separable();

  auto identity = [](double i) { return i; };
  auto unit = [](double) { return 1.0; };
  // Isotherm at theta0: dS = (P + dU/dv) / T0 dv.
  auto along_v = [&](double v) { return sys->planck_denominator(theta0, v) / t0; };
  Table iso = cumulative_table(along_v, d.v_min, d.v_max, v0, identity, unit, opts);
  s.isotherm_ = numerics::MonotoneCubic(std::move(iso.x), std::move(iso.y), std::move(iso.m));

  if (s.separable_) {
    // Isochore: dS = (dU/dtheta) / T dtheta, independent of v.
    auto along_theta = [&](double theta) { return sys->u_theta_raw(theta, v0) / (*tmap)(theta); };
    Table chore = cumulative_table(along_theta, d.theta_min, d.theta_max, theta0, identity, unit, opts);
    s.isochore_ =
        numerics::MonotoneCubic(std::move(chore.x), std::move(chore.y), std::move(chore.m));
    return s;
  }

  // Heat capacity depends on v: tabulate the isochore integral on a tensor
  // grid, with exact theta- and mixed partials and a quadrature v-partial.
  // The grid doubles until cell-centre probes agree with direct quadrature.
  auto isochore_at = [&](double theta, double v) {
    return numerics::integrate(
        [&](double th) { return sys->u_theta_raw(th, v) / (*tmap)(th); }, theta0, theta,
        opts.quad_tol);
  };
  std::size_t n = std::max<std::size_t>(opts.grid_2d, 5);
  for (int round = 0;; ++round) {
    std::vector<double> thetas = grid_through(d.theta_min, d.theta_max, theta0, n / 2 + 1);
    std::vector<double> vs = spaced(d.v_min, d.v_max, n);
    const std::size_t nt = thetas.size(), nv = vs.size();
    const std::size_t r = static_cast<std::size_t>(
        std::find(thetas.begin(), thetas.end(), theta0) - thetas.begin());
    std::vector<double> f(nt * nv), ft(nt * nv), fv(nt * nv), ftv(nt * nv);
    for (std::size_t j = 0; j < nv; ++j) {
      const double v = vs[j];
      auto cv = [&](double th) { return sys->u_theta_raw(th, v) / (*tmap)(th); };
      auto dcv = [&](double th) { return sys->u_theta_v_raw(th, v) / (*tmap)(th); };
      auto at = [&](std::size_t i) { return i * nv + j; };
      for (std::size_t i = 0; i < nt; ++i) {
        ft[at(i)] = cv(thetas[i]);
        ftv[at(i)] = dcv(thetas[i]);
      }
      for (std::size_t i = r + 1; i < nt; ++i) {
        f[at(i)] = f[at(i - 1)] + numerics::integrate(cv, thetas[i - 1], thetas[i], opts.quad_tol);
        fv[at(i)] = fv[at(i - 1)] + numerics::integrate(dcv, thetas[i - 1], thetas[i], opts.quad_tol);
      }
      for (std::size_t i = r; i-- > 0;) {
        f[at(i)] = f[at(i + 1)] - numerics::integrate(cv, thetas[i], thetas[i + 1], opts.quad_tol);
        fv[at(i)] = fv[at(i + 1)] - numerics::integrate(dcv, thetas[i], thetas[i + 1], opts.quad_tol);
      }
    }
    numerics::BicubicHermite table(thetas, vs, std::move(f), std::move(ft), std::move(fv),
                                   std::move(ftv));
    double worst = 0;
    const std::size_t stride_t = std::max<std::size_t>(1, nt / 16);
    const std::size_t stride_v = std::max<std::size_t>(1, nv / 16);
    for (std::size_t i = 0; i + 1 < nt; i += stride_t) {
      for (std::size_t j = (i / stride_t) % stride_v; j + 1 < nv; j += stride_v) {
        const double th = 0.5 * (thetas[i] + thetas[i + 1]);
        const double v = 0.5 * (vs[j] + vs[j + 1]);
        const double exact = isochore_at(th, v);
        worst = std::max(worst, std::abs(table(th, v) - exact) / std::max(1.0, std::abs(exact)));
      }
    }
    s.coupled_ = std::move(table);
    if (worst <= opts.interp_tol_2d || round >= opts.max_doublings_2d) break;
    n = 2 * n - 1;
  }
  return s;
}

double DerivedSpace::temperature_of(const SimpleState& x) const {
  return (*temperature)(system->theta_from_energy(x.u(), x.v()));
}

DerivedSpace derive_space(const SimpleSystem& sys, const TableOptions& opts) {
  auto system = std::make_shared<const SimpleSystem>(sys);
  auto tmap = std::make_shared<const TemperatureMap>(build_temperature_map(*system, opts));
  EntropyFn s = derive_entropy(system, tmap, opts);
  return {system, tmap, std::move(s)};
}

SpaceSet derive_all(const std::vector<EosSpec>& specs, const TableOptions& opts) {
  std::vector<std::optional<DerivedSpace>> out(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) { out[i] = derive_space(SimpleSystem(specs[i]), opts); });
  SpaceSet set;
  for (auto& d : out) {
    const std::string id = d->id();
    if (!set.emplace(id, std::move(*d)).second) throw InputError("duplicate space id '" + id + "'");
  }
  return set;
}

// ---------------------------------------------------------------------------

AdiabatResult adiabat_integrate(const SimpleSystem& sys, const SimpleState& start,
                                double v_target, int samples, const numerics::OdeOptions& ode) {
  const Domain& d = sys.domain();
  const double lambda = start.scale;
  const double v0 = start.v();
  const double v1 = v_target / lambda;
  const double theta_start = sys.theta_from_energy(start.u(), v0);
  if (v1 < d.v_min || v1 > d.v_max) {
    throw LeftDomain("target volume " + fmt(v_target) + " outside domain of '" + sys.id() + "'",
                     v_target, std::numeric_limits<double>::quiet_NaN());
  }
  double guess = theta_start;
  auto rhs = [&](double v, double u) {
    guess = sys.theta_from_energy(u, v, guess);
    return -sys.p_raw(guess, v);
  };
  auto valid = [&](double v, double u) {
    return v >= d.v_min && v <= d.v_max && u >= sys.u_raw(d.theta_min, v) &&
           u <= sys.u_raw(d.theta_max, v);
  };
  AdiabatResult out{start.energy, {sys.id(), {}}};
  auto record = [&](double v, double u) {
    out.curve.samples.push_back({{v * lambda}, u * lambda});
  };
  const int segments = samples >= 2 ? samples - 1 : 1;
  double u = start.u();
  if (samples < 2 || v0 == v1) record(v0, u);
  if (v0 == v1) return out;
  for (int k = 0; k < segments; ++k) {
    const double a = v0 + (v1 - v0) * k / segments;
    const double b = k + 1 == segments ? v1 : v0 + (v1 - v0) * (k + 1) / segments;
    if (samples >= 2 && k == 0) record(a, u);
    try {
      u = numerics::integrate_ode(rhs, a, u, b, ode, valid);
    } catch (const LeftDomain& e) {
      throw LeftDomain("adiabat of '" + sys.id() + "' left the domain at V=" +
                           fmt(e.exit_param() * lambda) + ", U=" + fmt(e.exit_state() * lambda),
                       e.exit_param() * lambda, e.exit_state() * lambda);
    }
    if (samples >= 2) record(b, u);
  }
  if (samples < 2) record(v1, u);
  out.energy = u * lambda;
  return out;
}

namespace {

struct JoinBracket {
  double lo, hi;
};

JoinBracket common_theta_range(std::span<const JoinComponent> comps) {
  JoinBracket b{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const auto& c : comps) {
    b.lo = std::max(b.lo, c.system->domain().theta_min);
    b.hi = std::min(b.hi, c.system->domain().theta_max);
  }
  if (!(b.lo <= b.hi)) throw OutOfRange("components share no common temperature range");
  return b;
}

double join_energy(std::span<const JoinComponent> comps, std::span<const double> vols, double theta) {
  double u = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    u += comps[i].scale * comps[i].system->u_raw(theta, vols[i] / comps[i].scale);
  }
  return u;
}

double equilibrium_theta(std::span<const JoinComponent> comps, std::span<const double> vols,
                         double u_total, double guess, const JoinBracket& br) {
  double scale = std::abs(u_total);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const Domain& d = comps[i].system->domain();
    const double v = vols[i] / comps[i].scale;
    if (v < d.v_min || v > d.v_max) {
      throw OutOfRange("join component volume outside domain of '" + comps[i].system->id() + "'");
    }
    scale = std::max(scale, std::abs(comps[i].scale * comps[i].system->u_raw(br.lo, v)));
  }
  auto f_df = [&](double theta) {
    double f = -u_total, df = 0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const double v = vols[i] / comps[i].scale;
      f += comps[i].scale * comps[i].system->u_raw(theta, v);
      df += comps[i].scale * comps[i].system->u_theta_raw(theta, v);
    }
    return std::pair{f, df};
  };
  return numerics::newton_bracketed(f_df, br.lo, br.hi, guess,
                                    1e-15 * std::max(1.0, scale));
}

}  // namespace

Equilibrium equilibrate(std::span<const JoinComponent> comps, double u_total, double theta_guess) {
  if (comps.empty()) throw Error("empty thermal join");
  const JoinBracket br = common_theta_range(comps);
  std::vector<double> vols;
  for (const auto& c : comps) vols.push_back(c.volume);
  Equilibrium eq;
  eq.theta = equilibrium_theta(comps, vols, u_total, theta_guess, br);
  for (const auto& c : comps) {
    eq.energies.push_back(c.scale * c.system->u_raw(eq.theta, c.volume / c.scale));
  }
  return eq;
}

AdiabatResult join_adiabat_integrate(std::span<const JoinComponent> start, double u_start,
                                     std::span<const double> target_volumes, int samples,
                                     const numerics::OdeOptions& ode) {
  const std::size_t k = start.size();
  if (target_volumes.size() != k) throw Error("join target has wrong number of work coordinates");
  const JoinBracket br = common_theta_range(start);
  std::vector<double> v0(k), dv(k), vols(k), rate(k);
  bool moves = false;
  bool geometric = true;
  for (std::size_t i = 0; i < k; ++i) {
    v0[i] = start[i].volume;
    dv[i] = target_volumes[i] - v0[i];
    moves = moves || dv[i] != 0.0;
    geometric = geometric && v0[i] > 0 && target_volumes[i] > 0;
    const Domain& d = start[i].system->domain();
    const double vt = target_volumes[i] / start[i].scale;
    if (vt < d.v_min || vt > d.v_max) {
      throw LeftDomain("join target volume outside domain of '" + start[i].system->id() + "'",
                       1.0, std::numeric_limits<double>::quiet_NaN());
    }
  }
  // Log-linear paths keep the temperature monotone for ideal components.
  auto set_volumes = [&](double s) {
    for (std::size_t i = 0; i < k; ++i) {
      if (geometric) {
        const double g = std::log(target_volumes[i] / v0[i]);
        vols[i] = v0[i] * std::exp(s * g);
        rate[i] = vols[i] * g;
      } else {
        vols[i] = v0[i] + s * dv[i];
        rate[i] = dv[i];
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (s == 1.0) vols[i] = target_volumes[i];
    }
  };
  double guess = equilibrium_theta(start, v0, u_start, -1.0, br);
  auto rhs = [&](double s, double u) {
    set_volumes(s);
    guess = equilibrium_theta(start, vols, u, guess, br);
    double du = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (dv[i] != 0.0) du -= start[i].system->p_raw(guess, vols[i] / start[i].scale) * rate[i];
    }
    return du;
  };
  auto valid = [&](double s, double u) {
    set_volumes(s);
    return u >= join_energy(start, vols, br.lo) && u <= join_energy(start, vols, br.hi);
  };
  AdiabatResult out{u_start, {"join", {}}};
  auto record = [&](double s, double u) {
    set_volumes(s);
    out.curve.samples.push_back({vols, u});
  };
  if (!moves) {
    record(0.0, u_start);
    return out;
  }
  const int segments = samples >= 2 ? samples - 1 : 1;
  double u = u_start;
  record(0.0, u);
  for (int seg = 0; seg < segments; ++seg) {
    const double a = static_cast<double>(seg) / segments;
    const double b = seg + 1 == segments ? 1.0 : static_cast<double>(seg + 1) / segments;
    try {
      u = numerics::integrate_ode(rhs, a, u, b, ode, valid);
    } catch (const LeftDomain& e) {
      set_volumes(e.exit_param());
      const double lo = join_energy(start, vols, br.lo);
      const double hi = join_energy(start, vols, br.hi);
      const bool through_min = std::abs(e.exit_state() - lo) <= std::abs(hi - e.exit_state());
      const double bound = join_energy(start, target_volumes, through_min ? br.lo : br.hi);
      throw TemperatureExit("join adiabat left the domain through theta_" +
                                std::string(through_min ? "min" : "max") + " at path parameter " +
                                fmt(e.exit_param()),
                            e.exit_param(), e.exit_state(), through_min, bound);
    }
    record(b, u);
  }
  out.energy = u;
  return out;
}

double adiabat_volume_at(const SimpleSystem& sys, double theta0, double v0, double theta_target,
                         const numerics::OdeOptions& ode) {
  const Domain& d = sys.domain();
  require_in_domain(sys, theta0, v0);
  if (theta_target < d.theta_min || theta_target > d.theta_max) {
    throw DomainError("target temperature " + fmt(theta_target) + " outside domain of '" +
                      sys.id() + "'");
  }
  if (theta_target == theta0) return v0;
  const bool logs = d.theta_min > 0 && d.v_min > 0;
  if (logs) {
    // y = ln v over t = ln theta.
    auto rhs = [&](double t, double y) {
      const double theta = std::exp(t), v = std::exp(y);
      const EosPoint e = sys.at(theta, v);
      return -theta * e.u_theta / (v * (e.p + e.u_v));
    };
    const double lo = std::log(d.v_min), hi = std::log(d.v_max);
    auto valid = [&](double, double y) { return y >= lo && y <= hi; };
    const double y = numerics::integrate_ode(rhs, std::log(theta0), std::log(v0),
                                             std::log(theta_target), ode, valid);
    return std::clamp(std::exp(y), d.v_min, d.v_max);
  }
  auto rhs = [&](double theta, double v) {
    const EosPoint e = sys.at(theta, v);
    return -e.u_theta / (e.p + e.u_v);
  };
  auto valid = [&](double, double v) { return v >= d.v_min && v <= d.v_max; };
  return numerics::integrate_ode(rhs, theta0, v0, theta_target, ode, valid);
}

std::pair<double, double> adiabat_theta_range(const SimpleSystem& sys, double theta0, double v0,
                                               const numerics::OdeOptions& ode) {
  const Domain& d = sys.domain();
  require_in_domain(sys, theta0, v0);
  const bool logs = d.theta_min > 0 && d.v_min > 0;
  // Temperature strictly decreases with v along an adiabat.
  auto sweep = [&](double v_end, double bound) {
    if (v_end == v0) return theta0;
    try {
      if (logs) {
        auto rhs = [&](double t, double y) {
          const double v = std::exp(t), theta = std::exp(y);
          const EosPoint e = sys.at(theta, v);
          return -v * (e.p + e.u_v) / (theta * e.u_theta);
        };
        const double lo = std::log(d.theta_min), hi = std::log(d.theta_max);
        auto valid = [&](double, double y) { return y >= lo && y <= hi; };
        return std::clamp(
            std::exp(numerics::integrate_ode(rhs, std::log(v0), std::log(theta0), std::log(v_end), ode, valid)),
            d.theta_min, d.theta_max);
      }
      auto rhs = [&](double v, double theta) {
        const EosPoint e = sys.at(theta, v);
        return -(e.p + e.u_v) / e.u_theta;
      };
      auto valid = [&](double, double th) { return th >= d.theta_min && th <= d.theta_max; };
      return numerics::integrate_ode(rhs, v0, theta0, v_end, ode, valid);
    } catch (const LeftDomain&) {
      return bound;
    }
  };
  return {sweep(d.v_max, d.theta_min), sweep(d.v_min, d.theta_max)};
}

std::vector<IsothermPoint> isotherm_trace(const DerivedSpace& space, double theta, double v_lo,
                                          double v_hi, int samples) {
  if (samples < 1) throw Error("isotherm needs at least one sample");
  const SimpleSystem& sys = *space.system;
  std::vector<IsothermPoint> out;
  const double t = (*space.temperature)(theta);
  for (int i = 0; i < samples; ++i) {
    const double v = samples == 1 ? v_lo : v_lo + (v_hi - v_lo) * i / (samples - 1);
    out.push_back({v, sys.energy(theta, v), sys.pressure(theta, v),
                   space.entropy.per_unit(theta, v), t});
  }
  return out;
}

}  // namespace adiabat

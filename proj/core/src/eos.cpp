#include "adiabat/eos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "adiabat/error.hpp"
#include "adiabat/numerics.hpp"

namespace adiabat {

namespace {

const std::string kSlots[] = {"theta", "v"};

Expr bind_constants(const Expr& e, const EosSpec& spec, const char* which) {
  Expr bound = e.substitute(spec.constants);
  for (const auto& name : bound.free_names()) {
    if (name != "theta" && name != "v") {
      throw MissingBinding(name + " (in " + which + " of space '" + spec.id + "')");
    }
  }
  return bound;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

SimpleSystem::SimpleSystem(EosSpec spec) : spec_(std::move(spec)) {
  u_expr_ = bind_constants(spec_.energy, spec_, "U");
  p_expr_ = bind_constants(spec_.pressure, spec_, "P");
  const Expr u_t = u_expr_.differentiate("theta");
  const Expr u_tv = u_t.differentiate("v");
  u_ = CompiledExpr(u_expr_, kSlots);
  p_ = CompiledExpr(p_expr_, kSlots);
  u_t_ = CompiledExpr(u_t, kSlots);
  u_v_ = CompiledExpr(u_expr_.differentiate("v"), kSlots);
  p_t_ = CompiledExpr(p_expr_.differentiate("theta"), kSlots);
  u_tv_ = CompiledExpr(u_tv, kSlots);
  separable_ = u_tv.is_number(0.0);
}

double SimpleSystem::energy(double theta, double v) const {
  if (!spec_.domain.contains(theta, v)) {
    throw DomainError("(theta=" + fmt(theta) + ", v=" + fmt(v) + ") outside domain of '" +
                      spec_.id + "'");
  }
  return u_(theta, v);
}

double SimpleSystem::pressure(double theta, double v) const {
  if (!spec_.domain.contains(theta, v)) {
    throw DomainError("(theta=" + fmt(theta) + ", v=" + fmt(v) + ") outside domain of '" +
                      spec_.id + "'");
  }
  return p_(theta, v);
}

EosPoint SimpleSystem::at(double theta, double v) const {
  return {u_(theta, v), p_(theta, v), u_t_(theta, v), u_v_(theta, v), p_t_(theta, v)};
}

double SimpleSystem::planck_integrand(double theta, double v) const {
  const double denom = planck_denominator(theta, v);
  if (!(denom > 0.0)) {
    throw SingularIntegrand("Planck denominator P + dU/dv <= 0 at theta=" + fmt(theta) +
                            ", v=" + fmt(v) + " in '" + spec_.id + "'");
  }
  return p_t_(theta, v) / denom;
}

double SimpleSystem::theta_from_energy(double u, double v, double theta_guess) const {
  const Domain& d = spec_.domain;
  if (v < d.v_min || v > d.v_max) {
    throw DomainError("v=" + fmt(v) + " outside domain of '" + spec_.id + "'");
  }
  const double u_lo = u_(d.theta_min, v);
  const double u_hi = u_(d.theta_max, v);
  if (u == u_lo) return d.theta_min;
  if (u == u_hi) return d.theta_max;
  if (u < u_lo || u > u_hi) {
    throw OutOfRange("energy " + fmt(u) + " outside [" + fmt(u_lo) + ", " + fmt(u_hi) +
                     "] at v=" + fmt(v) + " in '" + spec_.id + "'");
  }
  const double f_tol = 1e-15 * std::max(1.0, std::abs(u));
  return numerics::newton_bracketed(
      [&](double theta) {
        return std::pair{u_(theta, v) - u, u_t_(theta, v)};
      },
      d.theta_min, d.theta_max, theta_guess, f_tol);
}

// ---------------------------------------------------------------------------

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << "violation [" << v.check << "] " << v.message << '\n';
  for (const auto& w : warnings) os << "warning [" << w.check << "] " << w.message << '\n';
  if (ok()) os << "ok\n";
  return os.str();
}

double pressure_quotient(const PressureField& p, const Domain& d, double t0, double v0, double t1,
                         double v1, int levels) {
  const double ts = d.theta_max - d.theta_min;
  const double vs = d.v_max - d.v_min;
  double worst = 0.0;
  double pa = p(t0, v0);
  double pb = p(t1, v1);
  for (int level = 0; level < levels; ++level) {
    const double dist = std::hypot((t1 - t0) / ts, (v1 - v0) / vs);
    const double scale = std::max({std::abs(pa), std::abs(pb), std::numeric_limits<double>::min()});
    if (dist <= 0) break;
    worst = std::max(worst, std::abs(pb - pa) / scale / dist);
    const double tm = 0.5 * (t0 + t1), vm = 0.5 * (v0 + v1);
    const double pm = p(tm, vm);
    if (std::abs(pm - pa) >= std::abs(pb - pm)) {
      t1 = tm; v1 = vm; pb = pm;
    } else {
      t0 = tm; v0 = vm; pa = pm;
    }
  }
  return worst;
}

ValidationReport validate_spec(const EosSpec& spec, const ValidationOptions& opts) {
  ValidationReport report;
  const Domain& d = spec.domain;
  auto violate = [&](std::string check, std::string msg, double t = 0, double v = 0) {
    report.violations.push_back({std::move(check), std::move(msg), t, v});
  };
  if (opts.grid < 8) {
    violate("grid", "validation grid must be at least 8x8");
    return report;
  }
  if (!(d.theta_min < d.theta_max)) violate("bounds", "theta_min must be < theta_max");
  if (!(d.v_min < d.v_max)) violate("bounds", "v_min must be < v_max");
  if (!report.ok()) return report;
  if (!d.interior(spec.theta_ref, spec.v_ref)) {
    violate("reference_interior", "reference point not strictly inside the domain",
            spec.theta_ref, spec.v_ref);
  }

  std::unique_ptr<SimpleSystem> sys;
  try {
    sys = std::make_unique<SimpleSystem>(spec);
  } catch (const Error& e) {
    violate("expression", e.what());
    return report;
  }

  const int n = opts.grid;
  std::vector<double> thetas(n), vs(n);
  for (int i = 0; i < n; ++i) {
    thetas[i] = d.theta_min + (d.theta_max - d.theta_min) * i / (n - 1);
    vs[i] = d.v_min + (d.v_max - d.v_min) * i / (n - 1);
  }
  const auto where = [](double t, double v) { return " at theta=" + fmt(t) + ", v=" + fmt(v); };
  bool first_cv = true, first_p = true, first_den = true;
  for (double t : thetas) {
    for (double v : vs) {
      try {
        const EosPoint e = sys->at(t, v);
        if (!std::isfinite(e.u) || !std::isfinite(e.p)) {
          violate("evaluation", "non-finite U or P" + where(t, v), t, v);
          continue;
        }
        if (!(e.u_theta > 0) && first_cv) {
          violate("heat_capacity_positive", "(dU/dTheta)_V <= 0" + where(t, v), t, v);
          first_cv = false;
        }
        if (!(e.p > 0) && first_p) {
          violate("pressure_positive", "P <= 0" + where(t, v), t, v);
          first_p = false;
        }
        if (!(e.p + e.u_v > 0) && first_den) {
          violate("planck_denominator_positive", "P + (dU/dV)_Theta <= 0" + where(t, v), t, v);
          first_den = false;
        }
      } catch (const Error& e) {
        violate("evaluation", std::string(e.what()) + where(t, v), t, v);
      }
    }
  }
  if (!report.ok()) return report;

  // Lipschitz bound of P along grid edges, refined by bisection.
  const PressureField field = [&sys](double t, double v) { return sys->p_raw(t, v); };
  bool lip_reported = false;
  for (int i = 0; i < n && !lip_reported; ++i) {
    for (int j = 0; j + 1 < n && !lip_reported; ++j) {
      const double q1 = pressure_quotient(field, d, thetas[i], vs[j], thetas[i], vs[j + 1]);
      const double q2 = pressure_quotient(field, d, thetas[j], vs[i], thetas[j + 1], vs[i]);
      if (std::max(q1, q2) > opts.lipschitz_bound) {
        violate("lipschitz", "pressure difference quotient " + fmt(std::max(q1, q2)) +
                                 " exceeds bound" + where(thetas[i], vs[j]),
                thetas[i], vs[j]);
        lip_reported = true;
      }
    }
  }

  // (U, v) region {U(theta_min, v) <= U <= U(theta_max, v)} is convex iff the
  // lower edge is convex and the upper edge concave in v.
  const int m = 4 * n;
  auto edge_second_diff = [&](double theta, int k) {
    const double h = (d.v_max - d.v_min) / (m - 1);
    const double v = d.v_min + h * k;
    return (sys->u_raw(theta, v + h) - 2 * sys->u_raw(theta, v) + sys->u_raw(theta, v - h));
  };
  for (int k = 1; k + 1 < m; ++k) {
    const double lo = edge_second_diff(d.theta_min, k);
    const double hi = edge_second_diff(d.theta_max, k);
    const double scale = 1e-9 * std::max(1.0, std::abs(sys->u_raw(d.theta_max, d.v_min)));
    const double v = d.v_min + (d.v_max - d.v_min) * k / (m - 1);
    if (lo < -scale || hi > scale) {
      report.warnings.push_back({"convex_region",
                                 "induced (U,V) region is not convex near v=" + fmt(v),
                                 lo < -scale ? d.theta_min : d.theta_max, v});
      break;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

void SpaceRegistry::add(EosSpec spec) {
  if (spaces_.contains(spec.id)) throw InputError("duplicate space id '" + spec.id + "'");
  const std::string id = spec.id;
  spaces_.emplace(id, std::make_shared<const SimpleSystem>(std::move(spec)));
}

std::shared_ptr<const SimpleSystem> SpaceRegistry::ptr(const std::string& id) const {
  auto it = spaces_.find(id);
  if (it == spaces_.end()) throw InputError("unknown space '" + id + "'");
  return it->second;
}

const SimpleSystem& SpaceRegistry::at(const std::string& id) const {
  auto it = spaces_.find(id);
  if (it == spaces_.end()) throw InputError("unknown space '" + id + "'");
  return *it->second;
}

std::vector<std::string> SpaceRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : spaces_) out.push_back(id);
  return out;
}

}  // namespace adiabat

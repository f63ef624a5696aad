#include "adiabat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "adiabat/error.hpp"

namespace adiabat {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::map<std::string, double> CompoundState::matter() const {
  std::map<std::string, double> out;
  for (const auto& c : components) out[c.space] += c.scale;
  return out;
}

CompoundState CompoundState::scaled(double factor) const {
  CompoundState out;
  for (const auto& c : components) out.components.push_back(c.scaled(factor));
  return out;
}

CompoundState CompoundState::joined(const CompoundState& other) const {
  CompoundState out = *this;
  out.components.insert(out.components.end(), other.components.begin(), other.components.end());
  return out;
}

CompoundState canonicalize(const CompoundState& c) {
  std::vector<SimpleState> parts;
  for (const auto& s : c.components) {
    if (s.scale != 0.0) parts.push_back(s);
  }
  std::sort(parts.begin(), parts.end(), [](const SimpleState& x, const SimpleState& y) {
    if (x.space != y.space) return x.space < y.space;
    if (x.u() != y.u()) return x.u() < y.u();
    return x.v() < y.v();
  });
  CompoundState out;
  for (const auto& s : parts) {
    if (!out.components.empty()) {
      SimpleState& last = out.components.back();
      if (last.space == s.space && close(last.u(), s.u(), 1e-12) && close(last.v(), s.v(), 1e-12)) {
        last.scale += s.scale;
        last.energy += s.energy;
        last.volume += s.volume;
        continue;
      }
    }
    out.components.push_back(s);
  }
  return out;
}

std::string AccessVerdict::label() const {
  if (equivalent()) return "equivalent";
  if (forward) return "forward";
  if (backward) return "backward";
  return "incomparable";
}

// ---------------------------------------------------------------------------

struct OperationalOracle::Slot {
  const SimpleSystem* system;
  double scale;
  double u_a, v_a;  // per-unit state on side a
  double u_b, v_b;  // per-unit state on side b
  double theta_a = 0, theta_b = 0;
};

struct OperationalOracle::Aligned {
  std::vector<Slot> slots;
};

OperationalOracle::OperationalOracle(std::vector<std::shared_ptr<const SimpleSystem>> systems,
                                     OracleOptions opts)
    : opts_(std::move(opts)) {
  for (auto& s : systems) {
    const std::string id = s->id();
    systems_.emplace(id, std::move(s));
  }
}

OperationalOracle::OperationalOracle(const std::vector<DerivedSpace>& spaces, OracleOptions opts)
    : opts_(std::move(opts)) {
  for (const auto& d : spaces) systems_.emplace(d.id(), d.system);
}

OperationalOracle::OperationalOracle(const SpaceSet& spaces, OracleOptions opts)
    : opts_(std::move(opts)) {
  for (const auto& [id, d] : spaces) systems_.emplace(id, d.system);
}

OperationalOracle OperationalOracle::with_options(OracleOptions opts) const {
  OperationalOracle copy = *this;
  copy.opts_ = std::move(opts);
  return copy;
}

const SimpleSystem& OperationalOracle::system(const std::string& id) const {
  auto it = systems_.find(id);
  if (it == systems_.end()) throw InputError("unknown space '" + id + "'");
  return *it->second;
}

OperationalOracle::Aligned OperationalOracle::align(const CompoundState& a,
                                                    const CompoundState& b) const {
  const CompoundState ca = canonicalize(a);
  const CompoundState cb = canonicalize(b);
  for (const auto* side : {&ca, &cb}) {
    for (const auto& s : side->components) {
      if (!(s.scale > 0)) throw InputError("component scale must be positive");
    }
  }
  const auto ma = ca.matter();
  const auto mb = cb.matter();
  bool same = ma.size() == mb.size();
  for (auto ia = ma.begin(), ib = mb.begin(); same && ia != ma.end(); ++ia, ++ib) {
    same = ia->first == ib->first && close(ia->second, ib->second, opts_.signature_tol);
  }
  if (!same) {
    std::string msg = "matter content differs:";
    for (const auto& [id, m] : ma) msg += " " + id + "=" + fmt(m);
    msg += " vs";
    for (const auto& [id, m] : mb) msg += " " + id + "=" + fmt(m);
    throw SignatureMismatch(msg);
  }

  // Split both sides into a common refinement of matter slots per space.
  Aligned al;
  std::size_t i = 0, j = 0;
  while (i < ca.components.size() && j < cb.components.size()) {
    const std::string& space = ca.components[i].space;
    const SimpleSystem& sys = system(space);
    const double total = ma.at(space);
    double ra = ca.components[i].scale;
    double rb = cb.components[j].scale;
    std::size_t i_end = i, j_end = j;
    while (i_end < ca.components.size() && ca.components[i_end].space == space) ++i_end;
    while (j_end < cb.components.size() && cb.components[j_end].space == space) ++j_end;
    while (i < i_end && j < j_end) {
      const double w = std::min(ra, rb);
      const auto& xa = ca.components[i];
      const auto& xb = cb.components[j];
      if (w > 0) al.slots.push_back({&sys, w, xa.u(), xa.v(), xb.u(), xb.v()});
      ra -= w;
      rb -= w;
      const double eps = opts_.signature_tol * std::max(1.0, total);
      if (ra <= eps && ++i < i_end) ra = ca.components[i].scale;
      if (rb <= eps && ++j < j_end) rb = cb.components[j].scale;
    }
    i = i_end;
    j = j_end;
  }
  for (auto& s : al.slots) {
    s.theta_a = s.system->theta_from_energy(s.u_a, s.v_a);
    s.theta_b = s.system->theta_from_energy(s.u_b, s.v_b);
  }
  return al;
}

namespace {

template <class Slots>
std::pair<double, double> theta_interval(const Slots& slots, const numerics::OdeOptions& ode) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& s : slots) {
    for (auto [theta, v] : {std::pair{s.theta_a, s.v_a}, std::pair{s.theta_b, s.v_b}}) {
      const auto [l, h] = adiabat_theta_range(*s.system, theta, v, ode);
      lo = std::max(lo, l);
      hi = std::min(hi, h);
    }
  }
  if (!(lo <= hi)) {
    throw UnreachableTemperature("adiabats share no common temperature (lower " + fmt(lo) +
                                 " > upper " + fmt(hi) + ")");
  }
  return {lo, hi};
}

}  // namespace

std::pair<double, double> OperationalOracle::admissible_thetas(const CompoundState& a,
                                                               const CompoundState& b) const {
  return theta_interval(align(a, b).slots, opts_.ode);
}

double OperationalOracle::pick_theta(const Aligned& al) const {
  const auto [lo, hi] = theta_interval(al.slots, opts_.ode);
  if (opts_.theta_star) {
    const double t = *opts_.theta_star;
    if (t < lo || t > hi) {
      throw UnreachableTemperature("requested Theta*=" + fmt(t) + " outside reachable [" +
                                   fmt(lo) + ", " + fmt(hi) + "]");
    }
    return t;
  }
  return lo + opts_.theta_fraction * (hi - lo);
}

AccessVerdict OperationalOracle::run(const CompoundState& a, const CompoundState& b,
                                     bool both) const {
  const Aligned al = align(a, b);
  AccessVerdict verdict;
  if (al.slots.empty()) {
    verdict.forward = verdict.backward = true;
    return verdict;
  }
  const double theta = pick_theta(al);
  verdict.theta_star = theta;

  // Reversible slides to the common temperature, then the equilibrium join.
  const std::size_t k = al.slots.size();
  std::vector<JoinComponent> join_a(k), join_b(k);
  std::vector<double> vol_a(k), vol_b(k);
  double u_a = 0, u_b = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const Slot& s = al.slots[i];
    const double va = adiabat_volume_at(*s.system, s.theta_a, s.v_a, theta, opts_.ode);
    const double vb = adiabat_volume_at(*s.system, s.theta_b, s.v_b, theta, opts_.ode);
    vol_a[i] = s.scale * va;
    vol_b[i] = s.scale * vb;
    join_a[i] = {s.system, s.scale, vol_a[i]};
    join_b[i] = {s.system, s.scale, vol_b[i]};
    u_a += s.scale * s.system->u_raw(theta, va);
    u_b += s.scale * s.system->u_raw(theta, vb);
  }

  // Margin U_target - U_predicted. When the join adiabat crosses a
  // temperature bound first, the margin against that bound's isotherm at the
  // target has the same sign and is returned instead.
  auto decide = [&](const std::vector<JoinComponent>& from, double u_from,
                    const std::vector<double>& to_vol, double u_to) {
    double predicted;
    try {
      predicted = join_adiabat_integrate(from, u_from, to_vol, 0, opts_.ode).energy;
    } catch (const TemperatureExit& e) {
      predicted = e.bound_energy();
    }
    return std::pair{u_to - predicted, std::max({std::abs(u_to), std::abs(predicted), 1e-300})};
  };
  std::optional<std::pair<double, double>> fwd = decide(join_a, u_a, vol_b, u_b);
  std::optional<std::pair<double, double>> bwd;
  if (both) bwd = decide(join_b, u_b, vol_a, u_a);
  if (!bwd) bwd = std::pair{-fwd->first, fwd->second};
  const auto [mf, sf] = *fwd;
  const auto [mb, sb] = *bwd;
  verdict.forward_margin = mf;
  verdict.forward_scale = sf;
  verdict.forward = mf >= -opts_.energy_tol * sf;
  if (!both) return verdict;
  verdict.backward_margin = mb;
  verdict.backward_scale = sb;
  verdict.backward = mb >= -opts_.energy_tol * sb;
  // Inside the ambiguity band a one-sided answer is not resolved as strict.
  const double band = opts_.strict_factor * opts_.energy_tol;
  if (verdict.forward && !verdict.backward && mf <= band * sf) verdict.backward = true;
  if (verdict.backward && !verdict.forward && mb <= band * sb) verdict.forward = true;
  return verdict;
}

AccessVerdict OperationalOracle::compare(const CompoundState& a, const CompoundState& b) const {
  return run(a, b, true);
}

bool OperationalOracle::precedes(const CompoundState& a, const CompoundState& b) const {
  return run(a, b, false).forward;
}

// ---------------------------------------------------------------------------

std::pair<CompoundState, CompoundState> mixture_query(const SimpleState& x0, const SimpleState& x1,
                                                      const SimpleState& x, double lambda) {
  CompoundState left, right;
  right.components.push_back(x);
  auto put = [&](const SimpleState& s, double coeff) {
    if (coeff > 0) left.components.push_back(s.scaled(coeff / s.scale));
    if (coeff < 0) right.components.push_back(s.scaled(-coeff / s.scale));
  };
  put(x0, (1.0 - lambda) * x.scale);
  put(x1, lambda * x.scale);
  return {left, right};
}

namespace {

/// Boundary of a monotone predicate: `holds(l)` true below it, false above.
/// Returns the midpoint of the final bracket and the iteration count.
template <class Pred>
std::pair<double, int> boundary(const Pred& holds, double lo, double hi, bool lo_true,
                                bool hi_true, const ReconstructOptions& opts) {
  int expansions = 0;
  double width = hi - lo;
  while (!lo_true) {
    if (++expansions > opts.max_expansions) throw NonConvergence("could not bracket entropy from below");
    hi = lo;
    lo -= width;
    width *= 2;
    lo_true = holds(lo);
  }
  width = hi - lo;
  while (hi_true) {
    if (++expansions > opts.max_expansions) throw NonConvergence("could not bracket entropy from above");
    lo = hi;
    hi += width;
    width *= 2;
    hi_true = holds(hi);
  }
  int it = 0;
  while (hi - lo > opts.tol) {
    if (++it > opts.max_iterations) throw NonConvergence("entropy bisection exceeded iteration cap");
    const double mid = 0.5 * (lo + hi);
    if (holds(mid)) lo = mid; else hi = mid;
  }
  return {0.5 * (lo + hi), it};
}

}  // namespace

ReconstructionResult reconstruct_entropy(const AccessRelation& rel, const SimpleState& x0,
                                         const SimpleState& x1, const SimpleState& x,
                                         const ReconstructOptions& opts) {
  if (x0.space != x1.space || x0.space != x.space) {
    throw InputError("reconstruction needs X0, X1 and X in one space");
  }
  if (!opts.assume_strict_reference) {
    const AccessVerdict v = rel.compare(CompoundState{x0}, CompoundState{x1});
    if (!v.strict_forward()) {
      throw ReferenceNotStrict("X0 does not strictly precede X1 (verdict: " + v.label() + ")");
    }
  }
  // lambda_minus: mixture precedes X holds for small lambda.
  auto from_mixture = [&](double l) {
    auto [lhs, rhs] = mixture_query(x0, x1, x, l);
    return rel.precedes(lhs, rhs);
  };
  // lambda_plus: X precedes mixture holds for large lambda; negate to reuse.
  auto not_to_mixture = [&](double l) {
    auto [lhs, rhs] = mixture_query(x0, x1, x, l);
    return !rel.precedes(rhs, lhs);
  };
  ReconstructionResult r;
  std::tie(r.lambda_minus, r.iterations_minus) =
      boundary(from_mixture, 0.0, 1.0, from_mixture(0.0), from_mixture(1.0), opts);
  std::tie(r.lambda_plus, r.iterations_plus) =
      boundary(not_to_mixture, 0.0, 1.0, not_to_mixture(0.0), not_to_mixture(1.0), opts);
  r.entropy = 0.5 * (r.lambda_minus + r.lambda_plus);
  return r;
}

double comparability_gap(const AccessRelation& rel, const SimpleState& x0, const SimpleState& x1,
                         const SimpleState& x, const ReconstructOptions& opts) {
  return reconstruct_entropy(rel, x0, x1, x, opts).gap();
}

}  // namespace adiabat

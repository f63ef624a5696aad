#include "adiabat/axioms.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>

#include "adiabat/error.hpp"
#include "adiabat/parallel.hpp"
#include "json.hpp"

namespace adiabat {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string g6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Outcome {
  bool vacuous = false;
  bool ok = true;
  double severity = 0;
  std::string text;
};

Outcome vacuous() { return {true, true, 0, {}}; }
Outcome pass() { return {}; }
Outcome check(bool ok, double severity, std::string text) { return {false, ok, severity, std::move(text)}; }

struct Trial {
  std::vector<CompoundState> states;
  template <class... S>
  void record(const S&... s) {
    states = {CompoundState{s}...};
  }
};

using Body = std::function<Outcome(std::mt19937_64&, Trial&)>;

LawResult run_law(const std::string& name, const std::string& subject, const SamplerConfig& cfg,
                  int wanted, const Body& body) {
  const auto start = std::chrono::steady_clock::now();
  LawResult r;
  r.name = name;
  r.subject = subject;
  auto rng = law_stream(cfg.seed, name + "/" + subject);
  const int cap = 25 * wanted + 25;
  for (int attempt = 0; attempt < cap && r.trials < wanted; ++attempt) {
    Trial t;
    Outcome o;
    try {
      o = body(rng, t);
    } catch (const UnreachableTemperature&) {
      continue;
    } catch (const Error& e) {
      o = check(false, std::numeric_limits<double>::infinity(), std::string("error: ") + e.what());
    }
    if (o.vacuous) continue;
    ++r.trials;
    if (o.ok) continue;
    ++r.failures;
    if (r.failures == 1 || o.severity > r.worst) {
      r.worst = o.severity;
      r.witness.text = o.text;
      r.witness.states = t.states;
    }
  }
  if (r.trials == 0) {
    r.status = LawStatus::NotTested;
    r.note = "no non-vacuous trial found";
  } else {
    r.status = r.failures == 0 ? LawStatus::Pass : LawStatus::Fail;
    if (r.trials < wanted) {
      r.note = std::to_string(r.trials) + " of " + std::to_string(wanted) + " trials non-vacuous";
    }
  }
  r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

CompoundState one(const SimpleState& s) { return CompoundState{s}; }

const DerivedSpace& derived(const SpaceSet& spaces, const std::string& id) {
  auto it = spaces.find(id);
  if (it == spaces.end()) throw InputError("unknown space '" + id + "'");
  return it->second;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

/// Energy scale of a per-unit state: heat capacity times theta.
double energy_scale(const SimpleSystem& sys, double theta, double v) {
  return std::max(std::abs(sys.u_raw(theta, v)), sys.u_theta_raw(theta, v) * theta);
}

AxiomReport make_report(const SamplerConfig& cfg, std::vector<LawResult> laws) {
  AxiomReport r;
  r.seed = cfg.seed;
  r.samples = cfg.samples;
  r.laws = std::move(laws);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

void validate(const SamplerConfig& cfg) {
  if (cfg.samples < 1) throw InputError("samples must be at least 1");
  if (!(cfg.margin >= 0 && cfg.margin < 0.5)) throw InputError("margin must lie in [0, 0.5)");
  if (!(cfg.lipschitz_bound > 0)) throw InputError("lipschitz bound must be positive");
  if (!(cfg.reconstruction_tol > 0) || !(cfg.temperature_tol > 0)) {
    throw InputError("tolerances must be positive");
  }
  if (cfg.epsilon_ladder.empty()) throw InputError("epsilon ladder is empty");
}

std::string to_string(LawStatus s) {
  switch (s) {
    case LawStatus::Pass: return "PASS";
    case LawStatus::Fail: return "FAIL";
    case LawStatus::NotTested: return "NOT-TESTED";
  }
  return "?";
}

std::string describe(const CompoundState& c) {
  std::string out = "(";
  for (std::size_t i = 0; i < c.components.size(); ++i) {
    const SimpleState& s = c.components[i];
    if (i) out += "; ";
    out += s.space + " scale=" + g17(s.scale) + " U=" + g17(s.energy) + " V=" + g17(s.volume);
  }
  return out + ")";
}

std::mt19937_64 law_stream(std::uint64_t seed, const std::string& law) {
  return std::mt19937_64(splitmix64(seed ^ fnv1a(law)));
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool AxiomReport::passed() const {
  return std::none_of(laws.begin(), laws.end(),
                      [](const LawResult& l) { return l.status == LawStatus::Fail; });
}

const LawResult* AxiomReport::find(const std::string& name, const std::string& subject) const {
  for (const auto& l : laws) {
    if (l.name == name && (subject.empty() || l.subject == subject)) return &l;
  }
  return nullptr;
}

void AxiomReport::append(const AxiomReport& other) {
  laws.insert(laws.end(), other.laws.begin(), other.laws.end());
}

std::string AxiomReport::to_text(ReportFormat fmt) const {
  std::ostringstream os;
  int pass = 0, fail = 0, skipped = 0;
  os << "seed " << seed << ", " << samples << " samples per law\n";
  for (const auto& l : laws) {
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %-28s %-28s trials=%d failures=%d",
                  to_string(l.status).c_str(), l.name.c_str(), l.subject.c_str(), l.trials,
                  l.failures);
    os << line;
    if (fmt.include_timing) os << " elapsed=" << g6(l.elapsed) << "s";
    os << '\n';
    if (!l.note.empty()) os << "    note: " << l.note << '\n';
    if (l.status == LawStatus::Fail) {
      os << "    worst: " << g17(l.worst) << '\n';
      os << "    witness: " << l.witness.text << '\n';
      for (const auto& s : l.witness.states) os << "      " << describe(s) << '\n';
    }
    (l.status == LawStatus::Pass ? pass : l.status == LawStatus::Fail ? fail : skipped)++;
  }
  os << "summary: " << laws.size() << " laws, " << pass << " passed, " << fail << " failed, "
     << skipped << " not tested\n";
  return os.str();
}

std::string AxiomReport::to_json(ReportFormat fmt) const {
  using nlohmann::json;
  json doc;
  doc["seed"] = seed;
  doc["samples"] = samples;
  doc["passed"] = passed();
  json arr = json::array();
  for (const auto& l : laws) {
    json j;
    j["name"] = l.name;
    j["subject"] = l.subject;
    j["status"] = to_string(l.status);
    j["trials"] = l.trials;
    j["failures"] = l.failures;
    if (l.note.size()) j["note"] = l.note;
    if (fmt.include_timing) j["elapsed_s"] = l.elapsed;
    if (l.status == LawStatus::Fail) {
      json w;
      w["worst"] = std::isfinite(l.worst) ? json(l.worst) : json("inf");
      w["text"] = l.witness.text;
      json states = json::array();
      for (const auto& c : l.witness.states) {
        json comps = json::array();
        for (const auto& s : c.components) {
          comps.push_back({{"space", s.space}, {"scale", s.scale}, {"U", s.energy}, {"V", s.volume}});
        }
        states.push_back(comps);
      }
      w["states"] = states;
      j["witness"] = w;
    }
    arr.push_back(j);
  }
  doc["laws"] = arr;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

StateSampler::StateSampler(const SimpleSystem& sys, double margin) : sys_(&sys) {
  const Domain& d = sys.domain();
  auto shrink = [margin](double lo, double hi, bool& log) {
    log = lo > 0;
    if (log) {
      const double a = std::log(lo), b = std::log(hi);
      return std::pair{std::exp(a + margin * (b - a)), std::exp(b - margin * (b - a))};
    }
    return std::pair{lo + margin * (hi - lo), hi - margin * (hi - lo)};
  };
  std::tie(t_lo_, t_hi_) = shrink(d.theta_min, d.theta_max, t_log_);
  std::tie(v_lo_, v_hi_) = shrink(d.v_min, d.v_max, v_log_);
}

double StateSampler::theta(std::mt19937_64& rng) const {
  const double r = uniform01(rng);
  return t_log_ ? t_lo_ * std::pow(t_hi_ / t_lo_, r) : t_lo_ + r * (t_hi_ - t_lo_);
}

double StateSampler::volume(std::mt19937_64& rng) const {
  const double r = uniform01(rng);
  return v_log_ ? v_lo_ * std::pow(v_hi_ / v_lo_, r) : v_lo_ + r * (v_hi_ - v_lo_);
}

SimpleState StateSampler::at(double theta, double v, double scale) const {
  return {sys_->id(), scale, scale * sys_->energy(theta, v), scale * v};
}

SimpleState StateSampler::state(std::mt19937_64& rng, double scale) const {
  const double t = theta(rng);
  return at(t, volume(rng), scale);
}

// ---------------------------------------------------------------------------

AxiomReport check_general_axioms(const SpaceSet& spaces, const std::string& space,
                                 const AccessRelation& rel, const SamplerConfig& cfg) {
  validate(cfg);
  const StateSampler smp(*derived(spaces, space).system, cfg.margin);
  const int n = cfg.samples;
  std::vector<LawResult> laws;

  laws.push_back(run_law("A1 reflexivity", space, cfg, n, [&](auto& rng, Trial& t) {
    const SimpleState x = smp.state(rng);
    t.record(x);
    const AccessVerdict v = rel.compare(one(x), one(x));
    return check(v.equivalent(), 1, "X compared with itself gives " + v.label());
  }));

  laws.push_back(run_law("A2 transitivity", space, cfg, 2 * n, [&](auto& rng, Trial& t) {
    const std::array<SimpleState, 3> s{smp.state(rng), smp.state(rng), smp.state(rng)};
    bool f[3][3] = {};
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const AccessVerdict v = rel.compare(one(s[i]), one(s[j]));
        f[i][j] = v.forward;
        f[j][i] = v.backward;
      }
    }
    std::array<int, 3> p{0, 1, 2};
    do {
      if (f[p[0]][p[1]] && f[p[1]][p[2]]) {
        t.record(s[p[0]], s[p[1]], s[p[2]]);
        return check(f[p[0]][p[2]], 1, "A precedes B and B precedes C but A does not precede C");
      }
    } while (std::next_permutation(p.begin(), p.end()));
    return vacuous();
  }));

  laws.push_back(run_law("A3 consistency", space, cfg, n, [&](auto& rng, Trial& t) {
    auto ordered = [&](SimpleState& lo, SimpleState& hi) {
      lo = smp.state(rng);
      hi = smp.state(rng);
      const AccessVerdict v = rel.compare(one(lo), one(hi));
      if (v.forward) return true;
      if (v.backward) {
        std::swap(lo, hi);
        return true;
      }
      return false;
    };
    SimpleState a, a2, b, b2;
    if (!ordered(a, a2) || !ordered(b, b2)) return vacuous();
    t.states = {one(a), one(a2), one(b), one(b2)};
    const bool ok = rel.precedes(CompoundState{a, b}, CompoundState{a2, b2});
    return check(ok, 1, "A < A' and B < B' but (A, B) does not precede (A', B')");
  }));

  laws.push_back(run_law("A4 scaling invariance", space, cfg, n, [&](auto& rng, Trial& t) {
    const SimpleState a = smp.state(rng), b = smp.state(rng);
    t.record(a, b);
    const AccessVerdict v = rel.compare(one(a), one(b));
    for (double l : {0.5, 2.0}) {
      const AccessVerdict w = rel.compare(one(a.scaled(l)), one(b.scaled(l)));
      if (w.forward != v.forward || w.backward != v.backward) {
        return check(false, 1, "verdict " + v.label() + " becomes " + w.label() + " at scale " + g6(l));
      }
    }
    return pass();
  }));

  laws.push_back(run_law("A5 splitting and recombination", space, cfg, n, [&](auto& rng, Trial& t) {
    const SimpleState x = smp.state(rng);
    const double l = 0.05 + 0.9 * uniform01(rng);
    const CompoundState split{x.scaled(1 - l), x.scaled(l)};
    t.states = {one(x), split};
    const AccessVerdict v = rel.compare(one(x), split);
    return check(v.equivalent(), 1, "X versus its split at lambda=" + g17(l) + " gives " + v.label());
  }));

  laws.push_back(run_law("A6 stability", space, cfg, n, [&](auto& rng, Trial& t) {
    const SimpleState x = smp.state(rng);
    SimpleState y = smp.state(rng);
    if (uniform01(rng) < 0.5) {
      const SimpleSystem& sys = *derived(spaces, space).system;
      const double th = sys.theta_from_energy(x.u(), x.v());
      y = x;
      y.energy += 1e-3 * energy_scale(sys, th, x.v());
    }
    const SimpleState z0 = smp.state(rng), z1 = smp.state(rng);
    t.states = {one(x), one(y), one(z0), one(z1)};
    for (double eps : cfg.epsilon_ladder) {
      if (!rel.precedes(CompoundState{x, z0.scaled(eps)}, CompoundState{y, z1.scaled(eps)})) {
        return vacuous();
      }
    }
    return check(rel.precedes(one(x), one(y)), 1,
                 "(X, eps Z0) precedes (Y, eps Z1) on the whole ladder but X does not precede Y");
  }));

  return make_report(cfg, std::move(laws));
}

AxiomReport check_convexity(const SpaceSet& spaces, const std::string& space,
                            const AccessRelation& rel, const SamplerConfig& cfg) {
  validate(cfg);
  const DerivedSpace& d = derived(spaces, space);
  const StateSampler smp(*d.system, cfg.margin);
  const int n = cfg.samples;
  std::vector<LawResult> laws;

  laws.push_back(run_law("A7 concavity", space, cfg, n, [&](auto& rng, Trial& t) {
    const SimpleState x = smp.state(rng), y = smp.state(rng);
    const double s = uniform01(rng);
    const double um = s * x.u() + (1 - s) * y.u();
    const double vm = s * x.v() + (1 - s) * y.v();
    const SimpleState m{space, 1.0, um, vm};
    t.record(x, y, m);
    double sm;
    try {
      sm = d.entropy.per_unit_energy(um, vm);
    } catch (const OutOfRange&) {
      return vacuous();
    } catch (const DomainError&) {
      return vacuous();
    }
    const double sx = d.entropy.per_unit_energy(x.u(), x.v());
    const double sy = d.entropy.per_unit_energy(y.u(), y.v());
    const double chord = s * sx + (1 - s) * sy;
    const double deficit = chord - sm;
    return check(deficit <= 1e-9 * std::max({1.0, std::abs(sx), std::abs(sy)}), deficit,
                 "S(t X + (1-t) Y) below the chord by " + g17(deficit) + " at t=" + g17(s));
  }));

  laws.push_back(run_law("A7 forward-sector convexity", space, cfg, n, [&](auto& rng, Trial& t) {
    const SimpleState x = smp.state(rng), y = smp.state(rng), z = smp.state(rng);
    if (!rel.precedes(one(x), one(y)) || !rel.precedes(one(x), one(z))) return vacuous();
    const SimpleState m{space, 1.0, 0.5 * (y.energy + z.energy), 0.5 * (y.volume + z.volume)};
    try {
      d.system->theta_from_energy(m.u(), m.v());
    } catch (const OutOfRange&) {
      return vacuous();
    }
    t.record(x, y, z, m);
    return check(rel.precedes(one(x), one(m)), 1,
                 "Y and Z lie in the forward sector of X but their midpoint does not");
  }));

  return make_report(cfg, std::move(laws));
}

LawResult check_pressure_regularity(const SimpleSystem& sys, const SamplerConfig& cfg) {
  validate(cfg);
  const StateSampler smp(sys, cfg.margin);
  const PressureField field = [&sys](double t, double v) { return sys.p_raw(t, v); };
  return run_law("S2 tangent planes", sys.id(), cfg, cfg.samples, [&](auto& rng, Trial& t) {
    const double t0 = smp.theta(rng), v0 = smp.volume(rng);
    const double t1 = smp.theta(rng), v1 = smp.volume(rng);
    t.record(smp.at(t0, v0), smp.at(t1, v1));
    const double p0 = sys.pressure(t0, v0);
    if (!std::isfinite(p0)) return check(false, 1, "pressure not finite at the first state");
    const double q = pressure_quotient(field, sys.domain(), t0, v0, t1, v1);
    return check(q <= cfg.lipschitz_bound, q,
                 "pressure difference quotient " + g17(q) + " exceeds bound " + g6(cfg.lipschitz_bound) +
                     " on the segment between the states");
  });
}

AxiomReport check_simple_axioms(const SpaceSet& spaces, const std::string& space,
                                const AccessRelation& rel, const SamplerConfig& cfg) {
  validate(cfg);
  const DerivedSpace& d = derived(spaces, space);
  const SimpleSystem& sys = *d.system;
  const StateSampler smp(sys, cfg.margin);
  const int n = cfg.samples;
  std::vector<LawResult> laws;

  laws.push_back(run_law("S1 irreversibility", space, cfg, n, [&](auto& rng, Trial& t) {
    const double th = smp.theta(rng), v = smp.volume(rng);
    const SimpleState x = smp.at(th, v);
    SimpleState y = x;
    y.energy += 1e-3 * energy_scale(sys, th, v);
    t.record(x, y);
    const AccessVerdict verdict = rel.compare(one(x), one(y));
    return check(verdict.strict_forward(), 1, "heating at fixed V gives " + verdict.label());
  }));

  laws.push_back(check_pressure_regularity(sys, cfg));

  laws.push_back(run_law("S2 nested sectors", space, cfg, n, [&](auto& rng, Trial& t) {
    SimpleState x = smp.state(rng), y = smp.state(rng);
    const AccessVerdict v = rel.compare(one(x), one(y));
    if (v.backward && !v.forward) std::swap(x, y);
    else if (!v.forward) return vacuous();
    for (int k = 0; k < 10; ++k) {
      const SimpleState z = smp.state(rng);
      if (!rel.precedes(one(y), one(z))) continue;
      t.record(x, y, z);
      return check(rel.precedes(one(x), one(z)), 1,
                   "X precedes Y and Z lies in the forward sector of Y but not in that of X");
    }
    return vacuous();
  }));

  LawResult s3;
  s3.name = "S3 boundary connectedness";
  s3.subject = space;
  s3.status = LawStatus::NotTested;
  s3.note = "one work coordinate: every forward-sector boundary is a single curve";
  laws.push_back(s3);

  return make_report(cfg, std::move(laws));
}

AxiomReport check_thermal_axioms(const SpaceSet& spaces, const std::string& first,
                                 const std::string& second, const AccessRelation& rel,
                                 const SamplerConfig& cfg) {
  validate(cfg);
  const DerivedSpace& d1 = derived(spaces, first);
  const DerivedSpace& d2 = derived(spaces, second);
  const StateSampler s1(*d1.system, cfg.margin), s2(*d2.system, cfg.margin);
  const std::string subject = first + " x " + second;
  const int n = cfg.samples;
  const double t_lo = std::max(d1.temperature->t_min(), d2.temperature->t_min());
  const double t_hi = std::min(d1.temperature->t_max(), d2.temperature->t_max());
  std::vector<LawResult> laws;

  auto join_split = [](const SimpleState& x, const SimpleSystem& sx, const SimpleState& y,
                       const SimpleSystem& sy) {
    const JoinComponent comps[] = {{&sx, x.scale, x.volume}, {&sy, y.scale, y.volume}};
    const Equilibrium eq = equilibrate(comps, x.energy + y.energy);
    SimpleState x2 = x, y2 = y;
    x2.energy = eq.energies[0];
    y2.energy = eq.energies[1];
    return std::pair{x2, y2};
  };
  // State of the second space at the temperature of x, volume drawn at random.
  auto partner = [&](const SimpleState& x, const DerivedSpace& dx, const DerivedSpace& dy,
                     const StateSampler& sy, std::mt19937_64& rng) -> std::optional<SimpleState> {
    const double temp = dx.temperature_of(x);
    if (temp < t_lo || temp > t_hi) return std::nullopt;
    const double th = dy.temperature->theta_for(temp);
    return sy.at(th, sy.volume(rng));
  };

  laws.push_back(run_law("T1 join formation", subject, cfg, n, [&](auto& rng, Trial& t) {
    const SimpleState x = s1.state(rng), y = s2.state(rng);
    const auto [x2, y2] = join_split(x, *d1.system, y, *d2.system);
    t.states = {CompoundState{x, y}, CompoundState{x2, y2}};
    return check(rel.precedes(CompoundState{x, y}, CompoundState{x2, y2}), 1,
                 "the pair does not precede its thermal join");
  }));

  laws.push_back(run_law("T2 join splitting", subject, cfg, n, [&](auto& rng, Trial& t) {
    const SimpleState x = s1.state(rng);
    const auto y = partner(x, d1, d2, s2, rng);
    if (!y) return vacuous();
    const auto [x2, y2] = join_split(x, *d1.system, *y, *d2.system);
    t.states = {CompoundState{x, *y}, CompoundState{x2, y2}};
    const double before = d1.entropy.raw(x) + d2.entropy.raw(*y);
    const double after = d1.entropy.raw(x2) + d2.entropy.raw(y2);
    const double drift = rel_err(before, after);
    if (drift > 1e-9) {
      return check(false, drift, "entropy changes by " + g17(after - before) + " on join and split");
    }
    const AccessVerdict v = rel.compare(CompoundState{x, *y}, CompoundState{x2, y2});
    return check(v.equivalent(), 1, "equal-temperature pair versus its split join: " + v.label());
  }));

  laws.push_back(run_law("T3 zeroth law", subject, cfg, n, [&](auto& rng, Trial& t) {
    const SimpleState x = s1.state(rng);
    const auto y = partner(x, d1, d2, s2, rng);
    if (!y) return vacuous();
    const double th = d1.temperature->theta_for(d2.temperature_of(*y));
    const SimpleState z = s1.at(th, s1.volume(rng));
    t.record(x, *y, z);
    const auto [x2, z2] = join_split(x, *d1.system, z, *d1.system);
    const double scale = energy_scale(*d1.system, th, x.v());
    const double flow = std::abs(x2.energy - x.energy) / scale;
    return check(flow <= cfg.temperature_tol, flow,
                 "X and Z both equilibrate with Y but exchange energy " + g17(flow) + " (relative)");
  }));

  laws.push_back(run_law("T4 transversality", subject, cfg, n, [&](auto& rng, Trial& t) {
    const bool use_first = uniform01(rng) < 0.5;
    const DerivedSpace& d = use_first ? d1 : d2;
    const StateSampler& smp = use_first ? s1 : s2;
    const double th = smp.theta(rng), v = smp.volume(rng);
    const SimpleState x = smp.at(th, v);
    const Domain& dom = d.system->domain();
    for (double k = 1.01; k < 1e6; k *= 2) {
      const double v0 = v / k, v1 = v * k;
      if (v0 < dom.v_min || v1 > dom.v_max) break;
      const SimpleState x0 = smp.at(th, v0), x1 = smp.at(th, v1);
      t.record(x0, x, x1);
      if (rel.compare(one(x0), one(x)).strict_forward() && rel.compare(one(x), one(x1)).strict_forward()) {
        return pass();
      }
    }
    t.record(x);
    return check(false, 1, "no states strictly below and above X on its isotherm");
  }));

  if (!(t_lo < t_hi)) {
    LawResult r;
    r.name = "T5 temperature range";
    r.subject = subject;
    r.status = LawStatus::Fail;
    r.trials = r.failures = 1;
    r.worst = t_lo - t_hi;
    r.witness.text = "absolute temperature ranges [" + g17(d1.temperature->t_min()) + ", " +
                     g17(d1.temperature->t_max()) + "] and [" + g17(d2.temperature->t_min()) + ", " +
                     g17(d2.temperature->t_max()) + "] do not overlap";
    laws.push_back(r);
  } else {
    laws.push_back(run_law("T5 temperature range", subject, cfg, n, [&](auto& rng, Trial& t) {
      const bool use_first = uniform01(rng) < 0.5;
      const DerivedSpace& dx = use_first ? d1 : d2;
      const DerivedSpace& dy = use_first ? d2 : d1;
      const SimpleState x = (use_first ? s1 : s2).state(rng);
      const double temp = dx.temperature_of(x);
      if (temp < t_lo || temp > t_hi) return vacuous();
      t.record(x);
      const Domain& dom = dy.system->domain();
      double th;
      try {
        th = dy.temperature->theta_for(temp);
      } catch (const OutOfRange&) {
        return check(false, 1, "no partner temperature in " + dy.id());
      }
      for (int i = 0; i < 5; ++i) {
        const double v = dom.v_min * std::pow(dom.v_max / dom.v_min, i / 4.0);
        if (!dom.contains(th, v)) return check(false, 1, "no partner state at V=" + g17(v) + " in " + dy.id());
        dy.system->energy(th, v);
      }
      return pass();
    }));
    laws.back().note = "temperatures sampled inside the common range";
  }

  return make_report(cfg, std::move(laws));
}

AxiomReport check_CH(const SpaceSet& spaces, const std::string& space, const AccessRelation& rel,
                     const SamplerConfig& cfg) {
  validate(cfg);
  const DerivedSpace& d = derived(spaces, space);
  const StateSampler smp(*d.system, cfg.margin);
  std::vector<LawResult> laws;

  laws.push_back(run_law("CH pairs", space, cfg, 2 * cfg.samples, [&](auto& rng, Trial& t) {
    const double l = 0.05 + 0.9 * uniform01(rng);
    const CompoundState a{smp.state(rng, 1 - l), smp.state(rng, l)};
    const CompoundState b{smp.state(rng, 1 - l), smp.state(rng, l)};
    t.states = {a, b};
    const AccessVerdict v = rel.compare(a, b);
    return check(!v.incomparable(), 1, "states of (1-l) G x l G with l=" + g17(l) + " are incomparable");
  }));

  const EosSpec& spec = d.system->spec();
  const SimpleState x0 = smp.at(spec.theta_ref, spec.v_ref);
  const double th1 = std::sqrt(spec.theta_ref * spec.domain.theta_max);
  const SimpleState x1 = smp.at(th1, spec.v_ref);
  const int recon = std::max(1, cfg.samples / 2);
  ReconstructOptions ropts;
  ropts.tol = cfg.reconstruction_tol;
  laws.push_back(run_law("CH comparability gap", space, cfg, recon, [&](auto& rng, Trial& t) {
    const SimpleState x = smp.state(rng);
    t.record(x0, x1, x);
    const double gap = comparability_gap(rel, x0, x1, x, ropts);
    return check(gap <= 2 * ropts.tol * (1 + 1e-9), gap,
                 "lambda_plus - lambda_minus = " + g17(gap) + " exceeds 2 tol");
  }));

  return make_report(cfg, std::move(laws));
}

AxiomReport check_temperature_theorem(const SpaceSet& spaces, const std::string& space,
                                      const AccessRelation& rel, const SamplerConfig& cfg) {
  (void)rel;
  validate(cfg);
  const DerivedSpace& d = derived(spaces, space);
  const SimpleSystem& sys = *d.system;
  const StateSampler smp(sys, cfg.margin);
  const int n = cfg.samples;
  std::vector<LawResult> laws;

  auto join = [&](const SimpleState& x, const SimpleState& y) {
    const JoinComponent comps[] = {{&sys, x.scale, x.volume}, {&sys, y.scale, y.volume}};
    return equilibrate(comps, x.energy + y.energy);
  };

  laws.push_back(run_law("temperature positivity", space, cfg, n, [&](auto& rng, Trial& t) {
    const SimpleState x = smp.state(rng);
    t.record(x);
    const double temp = d.temperature_of(x);
    return check(std::isfinite(temp) && temp > 0, 1, "T = " + g17(temp));
  }));

  laws.push_back(run_law("temperature inverse slope", space, cfg, n, [&](auto& rng, Trial& t) {
    const double th = smp.theta(rng), v = smp.volume(rng);
    const SimpleState x = smp.at(th, v);
    t.record(x);
    const double h = 1e-4 * energy_scale(sys, th, v);
    const double sp = d.entropy.per_unit_energy(x.u() + h, v);
    const double sm = d.entropy.per_unit_energy(x.u() - h, v);
    const double slope = (sp - sm) / (2 * h);
    const double err = std::abs(slope * d.temperature_of(x) - 1.0);
    return check(err <= 1e-5, err, "T dS/dU - 1 = " + g17(err));
  }));

  laws.push_back(run_law("temperature equality and flow", space, cfg, n, [&](auto& rng, Trial& t) {
    const double th = smp.theta(rng);
    const SimpleState x = smp.at(th, smp.volume(rng));
    const bool equal = uniform01(rng) < 0.5;
    double th2 = th;
    if (!equal) {
      th2 = smp.theta(rng);
      if (std::abs(th2 - th) < 1e-3 * th) return vacuous();
    }
    const SimpleState y = smp.at(th2, smp.volume(rng));
    t.record(x, y);
    const Equilibrium eq = join(x, y);
    const double flow = std::abs(eq.energies[0] - x.energy) / energy_scale(sys, th, x.v());
    const double tx = d.temperature_of(x), ty = d.temperature_of(y);
    const bool same_t = std::abs(tx - ty) <= cfg.temperature_tol * std::max(tx, ty);
    const bool no_flow = flow <= cfg.temperature_tol;
    return check(same_t == no_flow, flow,
                 "T(X)=" + g17(tx) + ", T(Y)=" + g17(ty) + " but relative energy flow is " + g17(flow));
  }));

  laws.push_back(run_law("temperature heat flow", space, cfg, n, [&](auto& rng, Trial& t) {
    const SimpleState x = smp.state(rng), y = smp.state(rng);
    const double tx = d.temperature_of(x), ty = d.temperature_of(y);
    if (std::abs(tx - ty) <= cfg.temperature_tol * std::max(tx, ty)) return vacuous();
    t.record(x, y);
    const Equilibrium eq = join(x, y);
    const double hot_before = tx > ty ? x.energy : y.energy;
    const double hot_after = tx > ty ? eq.energies[0] : eq.energies[1];
    return check(hot_after < hot_before, hot_after - hot_before,
                 "hotter component gains energy " + g17(hot_after - hot_before));
  }));

  return make_report(cfg, std::move(laws));
}

// ---------------------------------------------------------------------------

std::string to_string(Suite s) {
  switch (s) {
    case Suite::General: return "general";
    case Suite::Convexity: return "convexity";
    case Suite::Simple: return "simple";
    case Suite::Thermal: return "thermal";
    case Suite::CH: return "ch";
    case Suite::Temperature: return "temperature";
  }
  return "?";
}

Suite parse_suite(const std::string& name) {
  for (Suite s : all_suites()) {
    if (to_string(s) == name) return s;
  }
  throw InputError("unknown suite '" + name + "'");
}

std::vector<Suite> all_suites() {
  return {Suite::General, Suite::Convexity, Suite::Simple, Suite::Thermal, Suite::CH, Suite::Temperature};
}

AxiomReport run_suites(const SpaceSet& spaces, const AccessRelation& rel,
                       const std::vector<Suite>& suites, const SamplerConfig& cfg) {
  validate(cfg);
  std::vector<std::function<AxiomReport()>> jobs;
  for (Suite s : suites) {
    if (s == Suite::Thermal) {
      for (auto i = spaces.begin(); i != spaces.end(); ++i) {
        for (auto j = std::next(i); j != spaces.end(); ++j) {
          if (i->second.system->spec().units != j->second.system->spec().units) continue;
          jobs.push_back([&, a = i->first, b = j->first] {
            return check_thermal_axioms(spaces, a, b, rel, cfg);
          });
        }
      }
      continue;
    }
    for (const auto& [id, _] : spaces) {
      jobs.push_back([&, s, id = id]() -> AxiomReport {
        switch (s) {
          case Suite::General: return check_general_axioms(spaces, id, rel, cfg);
          case Suite::Convexity: return check_convexity(spaces, id, rel, cfg);
          case Suite::Simple: return check_simple_axioms(spaces, id, rel, cfg);
          case Suite::CH: return check_CH(spaces, id, rel, cfg);
          case Suite::Temperature: return check_temperature_theorem(spaces, id, rel, cfg);
          case Suite::Thermal: break;
        }
        return {};
      });
    }
  }
  std::vector<AxiomReport> parts(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) { parts[i] = jobs[i](); });
  AxiomReport out;
  out.seed = cfg.seed;
  out.samples = cfg.samples;
  for (const auto& p : parts) out.append(p);
  return out;
}

// ---------------------------------------------------------------------------

namespace stubs {

double ScoreRelation::score(const CompoundState& c) {
  double s = 0;
  for (const auto& x : c.components) s += x.scale * (1.5 * std::log(x.u()) + std::log(x.v()));
  return s;
}

AccessVerdict ScoreRelation::compare(const CompoundState& a, const CompoundState& b) const {
  const double diff = score(b) - score(a);
  const double slack = 1e-12 * std::max({1.0, std::abs(score(a)), std::abs(score(b))});
  AccessVerdict v;
  const bool blind = std::abs(diff) < blind_;
  v.forward = !blind && diff >= -slack && diff <= reach_;
  v.backward = !blind && diff <= slack && -diff <= reach_;
  v.forward_margin = diff;
  v.backward_margin = -diff;
  return v;
}

AccessVerdict ComponentwiseRelation::compare(const CompoundState& a, const CompoundState& b) const {
  auto totals = [](const CompoundState& c) {
    double u = 0, v = 0;
    for (const auto& x : c.components) {
      u += x.energy;
      v += x.volume;
    }
    return std::pair{u, v};
  };
  const auto [ua, va] = totals(a);
  const auto [ub, vb] = totals(b);
  AccessVerdict r;
  r.forward = ua <= ub && va <= vb;
  r.backward = ub <= ua && vb <= va;
  r.forward_margin = std::min(ub - ua, vb - va);
  r.backward_margin = std::min(ua - ub, va - vb);
  return r;
}

namespace {

EosSpec reduced_gas(std::string id, double t_lo, double t_hi, double t_ref) {
  EosSpec s;
  s.id = std::move(id);
  s.energy = parse("c*R*theta");
  s.pressure = parse("R*theta/v");
  s.constants = {{"R", 1.0}, {"c", 1.5}};
  s.domain = {t_lo, t_hi, 0.1, 10.0};
  s.theta_ref = t_ref;
  s.v_ref = 1.0;
  return s;
}

}  // namespace

EosSpec reference_gas() { return reduced_gas("stub_gas", 0.5, 5, 1); }

std::vector<EosSpec> disjoint_theta_pair() {
  return {reduced_gas("cold_gas", 1, 10, 3), reduced_gas("hot_gas", 20, 100, 40)};
}

EosSpec discontinuous_pressure() {
  EosSpec s = reduced_gas("stepped_gas", 0.5, 5, 1);
  s.pressure = parse("R*theta/v*(1.5 + 0.5*(v - 1)/((v - 1)^2 + 1e-30)^0.5)");
  return s;
}

}  // namespace stubs

}  // namespace adiabat

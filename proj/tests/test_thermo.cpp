#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "adiabat/error.hpp"
#include "adiabat/thermo.hpp"
#include "support.hpp"

using namespace adiabat;

namespace {

// U = 1.5 theta + 0.01 theta^2 / v, P = theta/v - 0.01 theta^2/v^2: T = theta and
// S = 1.5 ln theta + 0.02 theta/v + ln v, with dU/dtheta depending on v.
EosSpec coupled_gas() {
  EosSpec s = support::ideal_spec("coupled_gas", 1, 10, 1, 10, 2, 2);
  s.energy = parse("1.5*theta + k*theta^2/v");
  s.pressure = parse("theta/v - k*theta^2/v^2");
  s.constants = {{"k", 0.01}};
  return s;
}

double coupled_entropy(double theta, double v) { return 1.5 * std::log(theta) + 0.02 * theta / v + std::log(v); }

const DerivedSpace& derived(const std::string& id) {
  static const SpaceSet spaces = [] {
    std::vector<EosSpec> specs = support::bundled();
    specs.push_back(coupled_gas());
    return derive_all(specs);
  }();
  return spaces.at(id);
}

}  // namespace

TEST_CASE("planck_temperature: ideal gas reduces to T0 theta / theta0") {
  const SimpleSystem sys(support::bundled("ideal_gas"));
  CHECK(planck_temperature(sys, 600, 0.01, {300, 300}) == doctest::Approx(600).epsilon(1e-10));
  CHECK(planck_temperature(sys, 300, 0.05, {300, 300}) == 300);
  CHECK(planck_temperature(sys, 150, 0.002, {300, 290}) == doctest::Approx(145).epsilon(1e-10));
}

TEST_CASE("planck_temperature: van der Waals is linear as well") {
  EosSpec s = support::bundled("vdw_gas");
  s.domain.theta_max = 1000;
  const SimpleSystem sys(s);
  CHECK(planck_temperature(sys, 450, 2.0, {300, 300}) == doctest::Approx(450).epsilon(1e-10));
  CHECK(planck_temperature(sys, 450, 0.2, {300, 300}) == doctest::Approx(450).epsilon(1e-10));
}

TEST_CASE("planck_temperature: non-positive denominator is singular") {
  EosSpec s = support::ideal_spec("bad", 1, 10, 1, 10, 2, 2);
  s.energy = parse("c*R*theta - 5*v");
  const SimpleSystem sys(s);
  CHECK_THROWS_AS(planck_temperature(sys, 5, 2, {2, 2}), SingularIntegrand);
}

TEST_CASE("property: planck_temperature does not depend on the probe volume") {
  for (const char* id : {"ideal_gas", "vdw_gas", "ideal_reduced", "coupled_gas"}) {
    const SimpleSystem& sys = *derived(id).system;
    const Domain& d = sys.domain();
    auto g = support::rng(20);
    for (int i = 0; i < 20; ++i) {
      const double t = support::uniform(g, d.theta_min, d.theta_max);
      const double v1 = support::log_uniform(g, d.v_min, d.v_max);
      const double v2 = support::log_uniform(g, d.v_min, d.v_max);
      const Anchor anchor{sys.spec().theta_ref, sys.anchor_temperature()};
      const double a = planck_temperature(sys, t, v1, anchor);
      const double b = planck_temperature(sys, t, v2, anchor);
      CAPTURE(id);
      CHECK(support::relative(a, b) <= 1e-8);
    }
  }
}

TEST_CASE("temperature map: anchor, monotonicity, positivity, inverse") {
  for (const char* id : {"ideal_gas", "vdw_gas", "ideal_reduced", "coupled_gas"}) {
    const DerivedSpace& d = derived(id);
    const TemperatureMap& t = *d.temperature;
    CAPTURE(id);
    CHECK(t(t.anchor().theta) == doctest::Approx(t.anchor().temperature).epsilon(1e-14));
    const auto temps = t.temperatures();
    CHECK(temps.front() > 0);
    for (std::size_t i = 1; i < temps.size(); ++i) CHECK(temps[i] > temps[i - 1]);
    const Domain& dom = d.system->domain();
    for (int k = 0; k <= 50; ++k) {
      const double th = dom.theta_min + (dom.theta_max - dom.theta_min) * k / 50;
      CHECK(support::relative(t(th), th) <= 1e-9);
      CHECK(std::abs(t.theta_for(t(th)) - th) <= 1e-9 * th);
    }
    CHECK_THROWS_AS(t.theta_for(t.t_max() * 2), OutOfRange);
  }
}

TEST_CASE("anchor temperature shifts the absolute scale") {
  EosSpec s = support::ideal_spec("anchored", 1, 10, 1, 10, 2, 2);
  s.anchor_temperature = 300;
  const DerivedSpace d = derive_space(SimpleSystem(s));
  CHECK((*d.temperature)(2) == doctest::Approx(300));
  CHECK((*d.temperature)(4) == doctest::Approx(600).epsilon(1e-10));
}

TEST_CASE("entropy: isothermal doubling of volume gives ln 2") {
  const DerivedSpace& d = derived("ideal_reduced");
  for (double theta : {0.5, 1.0, 7.0}) {
    const double ds = d.entropy.per_unit(theta, 2.0) - d.entropy.per_unit(theta, 1.0);
    CHECK(std::abs(ds - std::log(2.0)) <= 1e-8);
  }
}

TEST_CASE("entropy: reference point carries the reference entropy") {
  for (const char* id : {"ideal_gas", "vdw_gas", "ideal_reduced", "coupled_gas"}) {
    const DerivedSpace& d = derived(id);
    const EosSpec& s = d.system->spec();
    CHECK(d.entropy.per_unit(s.theta_ref, s.v_ref) == doctest::Approx(s.reference_entropy).epsilon(1e-15));
  }
  EosSpec s = support::ideal_spec("offset", 1, 10, 1, 10, 2, 2, 0.75);
  const DerivedSpace d = derive_space(SimpleSystem(s));
  CHECK(d.entropy.per_unit(2, 2) == 0.75);
  CHECK_THROWS_AS(d.entropy.per_unit(0.5, 2), DomainError);
}

TEST_CASE("entropy: matches the closed forms") {
  auto g = support::rng(33);
  for (int i = 0; i < 200; ++i) {
    {
      const DerivedSpace& d = derived("ideal_reduced");
      const double t = support::log_uniform(g, 0.01, 100), v = support::log_uniform(g, 1e-3, 1e3);
      const double expected = support::ideal_entropy(1.5 * t, v) - support::ideal_entropy(1.5, 1);
      CHECK(std::abs(d.entropy.per_unit(t, v) - expected) <= 1e-8);
    }
    {
      const DerivedSpace& d = derived("vdw_gas");
      const double t = support::uniform(g, 1, 100), v = support::log_uniform(g, 0.1, 1000);
      const double u = 1.5 * t - 0.1 / v;
      const double expected = support::vdw_entropy(u, v) - support::vdw_entropy(3 - 0.1, 1);
      CHECK(std::abs(d.entropy.per_unit(t, v) - expected) <= 1e-8);
      CHECK(std::abs(d.entropy.per_unit_energy(u, v) - expected) <= 1e-8);
    }
    {
      const DerivedSpace& d = derived("coupled_gas");
      const double t = support::uniform(g, 1, 10), v = support::uniform(g, 1, 10);
      const double expected = coupled_entropy(t, v) - coupled_entropy(2, 2);
      CHECK(std::abs(d.entropy.per_unit(t, v) - expected) <= 1e-7);
    }
  }
}

TEST_CASE("property: entropy is path independent (rectangle vs canonical path)") {
  for (const char* id : {"ideal_reduced", "vdw_gas", "coupled_gas"}) {
    const DerivedSpace& d = derived(id);
    const Domain& dom = d.system->domain();
    auto g = support::rng(44);
    for (int i = 0; i < 20; ++i) {
      const double t0 = support::uniform(g, dom.theta_min, dom.theta_max);
      const double t1 = support::uniform(g, dom.theta_min, dom.theta_max);
      const double v0 = support::log_uniform(g, dom.v_min, dom.v_max);
      const double v1 = support::log_uniform(g, dom.v_min, dom.v_max);
      const double rect = support::rectangle_delta_s(*d.system, t0, v0, t1, v1);
      const double table = d.entropy.per_unit(t1, v1) - d.entropy.per_unit(t0, v0);
      CAPTURE(id);
      CHECK(std::abs(rect - table) <= (std::string(id) == "coupled_gas" ? 1e-7 : 1e-8));
    }
  }
}

TEST_CASE("entropy: extensive evaluation and constants") {
  DerivedSpace d = derive_space(SimpleSystem(support::bundled("ideal_reduced")));
  const SimpleState x{"ideal_reduced", 1.0, 3.0, 2.0};
  CHECK(d.entropy.raw(x.scaled(2.5)) == doctest::Approx(2.5 * d.entropy.raw(x)).epsilon(1e-14));
  d.entropy.set_constants(2.0, 0.5);
  CHECK(d.entropy.of(x.scaled(3)) == doctest::Approx(3 * (2 * d.entropy.raw(x) + 0.5)).epsilon(1e-14));
}

TEST_CASE("property: 1/T equals dS/dU at 100 interior points") {
  for (const char* id : {"ideal_reduced", "vdw_gas", "ideal_gas", "coupled_gas"}) {
    const DerivedSpace& d = derived(id);
    const Domain& dom = d.system->domain();
    auto g = support::rng(55);
    for (int i = 0; i < 100; ++i) {
      const double t = support::uniform(g, dom.theta_min + 0.1 * (dom.theta_max - dom.theta_min),
                                        dom.theta_max - 0.1 * (dom.theta_max - dom.theta_min));
      const double v = support::log_uniform(g, dom.v_min * 1.5, dom.v_max / 1.5);
      const double u = d.system->energy(t, v);
      const double h = 1e-5 * std::abs(u);
      const double ds = (d.entropy.per_unit_energy(u + h, v) - d.entropy.per_unit_energy(u - h, v)) / (2 * h);
      CAPTURE(id);
      CHECK(support::relative(ds, 1.0 / d.temperature_of({id, 1.0, u, v})) <= 1e-5);
    }
  }
}

TEST_CASE("property: entropy is concave along 500 random chords") {
  for (const char* id : {"ideal_reduced", "vdw_gas", "coupled_gas"}) {
    const DerivedSpace& d = derived(id);
    const SimpleSystem& sys = *d.system;
    const Domain& dom = sys.domain();
    auto g = support::rng(66);
    int tested = 0;
    for (int i = 0; i < 500; ++i) {
      const double tx = support::uniform(g, dom.theta_min, dom.theta_max), vx = support::log_uniform(g, dom.v_min, dom.v_max);
      const double ty = support::uniform(g, dom.theta_min, dom.theta_max), vy = support::log_uniform(g, dom.v_min, dom.v_max);
      const double ux = sys.energy(tx, vx), uy = sys.energy(ty, vy);
      const double sx = d.entropy.per_unit(tx, vx), sy = d.entropy.per_unit(ty, vy);
      for (double t : {0.25, 0.5, 0.75}) {
        const double u = t * ux + (1 - t) * uy, v = t * vx + (1 - t) * vy;
        double s = 0;
        try {
          s = d.entropy.per_unit_energy(u, v);
        } catch (const Error&) {
          continue;  // chord leaves a non-convex region
        }
        CAPTURE(id);
        CHECK(s >= t * sx + (1 - t) * sy - 1e-9);
        ++tested;
      }
    }
    CHECK(tested > 1000);
  }
}

TEST_CASE("adiabat: reduced ideal gas from (1,1) to V=8") {
  const SimpleSystem& sys = *derived("ideal_reduced").system;
  const AdiabatResult r = adiabat_integrate(sys, {"ideal_reduced", 1.0, 1.0, 1.0}, 8.0);
  CHECK(support::relative(r.energy, 0.25) <= 1e-9);
  const AdiabatResult same = adiabat_integrate(sys, {"ideal_reduced", 1.0, 1.0, 1.0}, 1.0);
  CHECK(same.energy == 1.0);
  // Scaled copies follow the per-unit curve.
  const AdiabatResult scaled = adiabat_integrate(sys, {"ideal_reduced", 2.0, 2.0, 2.0}, 16.0);
  CHECK(support::relative(scaled.energy, 0.5) <= 1e-9);
}

TEST_CASE("adiabat: van der Waals first integral along a 100-point curve") {
  const DerivedSpace& d = derived("vdw_gas");
  const SimpleState start{"vdw_gas", 1.0, 30.0, 1.0};
  const AdiabatResult r = adiabat_integrate(*d.system, start, 20.0, 100);
  REQUIRE(r.curve.samples.size() == 100);
  auto first_integral = [](double u, double v) { return (u + 0.1 / v) * std::pow(v - 0.05, 1.0 / 1.5); };
  const double c0 = first_integral(30.0, 1.0);
  const double s0 = d.entropy.raw(start);
  double s_min = s0, s_max = s0;
  for (const auto& p : r.curve.samples) {
    CHECK(support::relative(first_integral(p.energy, p.volumes[0]), c0) <= 1e-8);
    const double s = d.entropy.raw({"vdw_gas", 1.0, p.energy, p.volumes[0]});
    s_min = std::min(s_min, s);
    s_max = std::max(s_max, s);
  }
  CHECK(r.curve.samples.back().volumes[0] == 20.0);
  // Level set of S relative to the entropy range of the space.
  const double range = d.entropy.per_unit(100, 1000) - d.entropy.per_unit(1, 0.1);
  CHECK(s_max - s_min <= 1e-6 * range);
}

TEST_CASE("adiabat: leaving the domain reports the exit point") {
  const SimpleSystem& sys = *derived("vdw_gas").system;
  try {
    adiabat_integrate(sys, {"vdw_gas", 1.0, 2.9, 1.0}, 5.0);
    FAIL("expected LeftDomain");
  } catch (const LeftDomain& e) {
    CHECK(e.exit_param() > 1.0);
    CHECK(e.exit_param() < 5.0);
    // Exit at theta_min: U = 1.5 - 0.1/V on the adiabat.
    CHECK(e.exit_state() == doctest::Approx(1.5 - 0.1 / e.exit_param()).epsilon(1e-6));
  }
}

TEST_CASE("property: adiabats are level sets of the entropy") {
  for (const char* id : {"ideal_reduced", "coupled_gas", "ideal_gas"}) {
    const DerivedSpace& d = derived(id);
    const Domain& dom = d.system->domain();
    auto g = support::rng(77);
    for (int i = 0; i < 20; ++i) {
      const double t = support::uniform(g, dom.theta_min + 0.4 * (dom.theta_max - dom.theta_min),
                                        dom.theta_max - 0.4 * (dom.theta_max - dom.theta_min));
      const double v = std::sqrt(dom.v_min * dom.v_max) * support::log_uniform(g, 0.8, 1.25);
      const SimpleState x{id, 1.0, d.system->energy(t, v), v};
      const double target = v * support::log_uniform(g, 0.7, 1.4);
      AdiabatResult r;
      try {
        r = adiabat_integrate(*d.system, x, target, 20);
      } catch (const LeftDomain&) {
        continue;
      }
      const double s0 = d.entropy.raw(x);
      const double range = std::abs(d.entropy.per_unit(dom.theta_max, dom.v_max) - d.entropy.per_unit(dom.theta_min, dom.v_min));
      for (const auto& p : r.curve.samples) {
        CAPTURE(id);
        CHECK(std::abs(d.entropy.raw({id, 1.0, p.energy, p.volumes[0]}) - s0) <= 1e-6 * range);
      }
    }
  }
}

TEST_CASE("adiabat slides: volume at a target temperature and the swept range") {
  const SimpleSystem& sys = *derived("ideal_reduced").system;
  // theta v^(2/3) is constant along the adiabat.
  const double v = adiabat_volume_at(sys, 2.0, 1.0, 1.0);
  CHECK(support::relative(v, std::pow(2.0, 1.5)) <= 1e-9);
  const auto [lo, hi] = adiabat_theta_range(sys, 2.0, 1.0);
  CHECK(support::relative(lo, 2.0 * std::pow(1.0 / 1000, 2.0 / 3)) <= 1e-9);
  CHECK(support::relative(hi, 100.0) <= 1e-9);
}

TEST_CASE("equilibrate: 300 K and 500 K average to 400 K") {
  const SimpleSystem& sys = *derived("ideal_gas").system;
  const JoinComponent comps[] = {{&sys, 1.0, 0.01}, {&sys, 1.0, 0.01}};
  const double u = sys.energy(300, 0.01) + sys.energy(500, 0.01);
  const Equilibrium eq = equilibrate(comps, u);
  CHECK(support::relative(eq.theta, 400) <= 1e-12);
  CHECK(support::relative(eq.energies[0], sys.energy(400, 0.01)) <= 1e-12);
  CHECK(support::relative(eq.energies[0] + eq.energies[1], u) <= 1e-12);
}

TEST_CASE("equilibrate: single component and fixed point") {
  const SimpleSystem& sys = *derived("vdw_gas").system;
  const JoinComponent one[] = {{&sys, 2.0, 4.0}};
  const double u = 2.0 * sys.energy(17, 2.0);
  CHECK(support::relative(equilibrate(one, u).theta, sys.theta_from_energy(u / 2, 2.0)) <= 1e-12);

  const SimpleSystem& ideal = *derived("ideal_reduced").system;
  const JoinComponent two[] = {{&sys, 1.0, 3.0}, {&ideal, 0.5, 0.25}};
  const double ua = sys.energy(12, 3.0), ub = 0.5 * ideal.energy(12, 0.5);
  const Equilibrium eq = equilibrate(two, ua + ub);
  CHECK(support::relative(eq.theta, 12) <= 1e-12);
  CHECK(support::relative(eq.energies[0], ua) <= 1e-12);
  CHECK(support::relative(eq.energies[1], ub) <= 1e-12);
  CHECK_THROWS_AS(equilibrate(two, 1e9), OutOfRange);
}

TEST_CASE("property: heat flows from hot to cold and the join raises entropy") {
  const DerivedSpace& a = derived("vdw_gas");
  const DerivedSpace& b = derived("ideal_reduced");
  auto g = support::rng(88);
  for (int i = 0; i < 100; ++i) {
    const double ta = support::uniform(g, 2, 90), tb = support::uniform(g, 2, 90);
    const double va = support::log_uniform(g, 0.2, 500), vb = support::log_uniform(g, 0.01, 500);
    const double la = support::uniform(g, 0.2, 3), lb = support::uniform(g, 0.2, 3);
    const double ua = la * a.system->energy(ta, va), ub = lb * b.system->energy(tb, vb);
    const JoinComponent comps[] = {{a.system.get(), la, la * va}, {b.system.get(), lb, lb * vb}};
    const Equilibrium eq = equilibrate(comps, ua + ub);
    const double before = a.entropy.raw({"vdw_gas", la, ua, la * va}) + b.entropy.raw({"ideal_reduced", lb, ub, lb * vb});
    const double after = a.entropy.raw({"vdw_gas", la, eq.energies[0], la * va}) +
                         b.entropy.raw({"ideal_reduced", lb, eq.energies[1], lb * vb});
    if (ta > tb) {
      CHECK(eq.energies[0] < ua);
    } else {
      CHECK(eq.energies[0] > ua);
    }
    CHECK(after >= before - 1e-9);
    CHECK(after > before);
  }
  // Equal temperatures: no flow and no entropy change.
  const double ua = a.system->energy(20, 1), ub = b.system->energy(20, 2);
  const JoinComponent comps[] = {{a.system.get(), 1.0, 1.0}, {b.system.get(), 1.0, 2.0}};
  const Equilibrium eq = equilibrate(comps, ua + ub);
  const double before = a.entropy.raw({"vdw_gas", 1, ua, 1}) + b.entropy.raw({"ideal_reduced", 1, ub, 2});
  const double after = a.entropy.raw({"vdw_gas", 1, eq.energies[0], 1}) + b.entropy.raw({"ideal_reduced", 1, eq.energies[1], 2});
  CHECK(std::abs(after - before) <= 1e-9);
}

TEST_CASE("join adiabat conserves the summed entropy") {
  const DerivedSpace& a = derived("vdw_gas");
  const DerivedSpace& b = derived("ideal_reduced");
  const JoinComponent start[] = {{a.system.get(), 1.0, 2.0}, {b.system.get(), 2.0, 3.0}};
  const double theta = 10;
  const double u0 = a.system->energy(theta, 2.0) + 2.0 * b.system->energy(theta, 1.5);
  const double targets[] = {5.0, 1.0};
  const AdiabatResult r = join_adiabat_integrate(start, u0, targets);
  auto join_entropy = [&](double u, double v1, double v2) {
    const JoinComponent c[] = {{a.system.get(), 1.0, v1}, {b.system.get(), 2.0, v2}};
    const Equilibrium eq = equilibrate(c, u);
    return a.entropy.raw({"vdw_gas", 1.0, eq.energies[0], v1}) + b.entropy.raw({"ideal_reduced", 2.0, eq.energies[1], v2});
  };
  CHECK(std::abs(join_entropy(r.energy, 5.0, 1.0) - join_entropy(u0, 2.0, 3.0)) <= 1e-8);
}

TEST_CASE("isotherm traces") {
  const DerivedSpace& ideal = derived("ideal_reduced");
  const auto flat = isotherm_trace(ideal, 3.0, 0.5, 5.0, 11);
  REQUIRE(flat.size() == 11);
  for (const auto& p : flat) {
    CHECK(p.u == doctest::Approx(4.5).epsilon(1e-14));
    CHECK(p.t == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(p.p == doctest::Approx(3.0 / p.v).epsilon(1e-14));
  }
  CHECK(flat.back().v == 5.0);
  CHECK(isotherm_trace(ideal, 3.0, 0.5, 5.0, 1).size() == 1);

  const auto rising = isotherm_trace(derived("vdw_gas"), 10.0, 0.2, 50.0, 40);
  for (std::size_t i = 1; i < rising.size(); ++i) {
    CHECK(rising[i].u > rising[i - 1].u);
    CHECK(rising[i].s > rising[i - 1].s);
  }
  CHECK_THROWS_AS(isotherm_trace(ideal, 3.0, 0.5, 5000.0, 3), DomainError);
}

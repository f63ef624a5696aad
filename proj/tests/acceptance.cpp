// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "adiabat/axioms.hpp"
#include "adiabat/calibration.hpp"
#include "adiabat/oracle.hpp"
#include "adiabat/parallel.hpp"
#include "adiabat/registry.hpp"
#include "adiabat/thermo.hpp"
#include "support.hpp"

using namespace adiabat;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const SpaceSet& reduced() {
  static const SpaceSet s = derive_all({support::bundled("ideal_reduced"), support::bundled("vdw_gas")});
  return s;
}

SimpleState middle_state(std::mt19937_64& g, const std::string& space, double scale) {
  const SimpleSystem& sys = *reduced().at(space).system;
  const Domain& d = sys.domain();
  const double t = support::log_uniform(g, d.theta_min * std::pow(d.theta_max / d.theta_min, 0.3),
                                        d.theta_min * std::pow(d.theta_max / d.theta_min, 0.7));
  const double v = support::log_uniform(g, d.v_min * std::pow(d.v_max / d.v_min, 0.3),
                                        d.v_min * std::pow(d.v_max / d.v_min, 0.7));
  return {space, scale, scale * sys.energy(t, v), scale * v};
}

Outcome planck_linearity() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0;
  for (const char* id : {"ideal_gas", "vdw_gas"}) {
    const EosSpec& spec = support::bundled(id);
    const SimpleSystem sys(spec);
    const DerivedSpace d = derive_space(sys);
    const Anchor a = d.temperature->anchor();
    const Domain& dom = spec.domain;
    for (int i = 0; i < 50; ++i) {
      const double theta = dom.theta_min + (dom.theta_max - dom.theta_min) * i / 49;
      // The integrand reduces to 1/theta' for both gases.
      const double expected = a.temperature * theta / a.theta;
      const double direct = planck_temperature(sys, theta, spec.v_ref, a);
      const double table = (*d.temperature)(theta);
      worst = std::max({worst, std::abs(direct - expected) / direct, std::abs(table - expected) / table});
    }
  }
  const double elapsed = seconds_since(t0);
  o.require(worst <= 1e-6, "relative error " + fmt("%.3g", worst));
  o.require(elapsed < 5, "runtime " + fmt("%.2f", elapsed) + " s");
  o.detail = "max rel err " + fmt("%.2e", worst) + ", " + fmt("%.2f", elapsed) + " s" +
             (o.detail.empty() ? "" : " (" + o.detail + ")");
  return o;
}

Outcome adiabat_ode() {
  Outcome o;
  const auto t0 = Clock::now();
  const SimpleSystem& ideal = *reduced().at("ideal_reduced").system;
  const double u = adiabat_integrate(ideal, {"ideal_reduced", 1.0, 1.0, 1.0}, 8.0).energy;
  const double err_ideal = support::relative(u, 0.25);

  const SimpleSystem& vdw = *reduced().at("vdw_gas").system;
  const AdiabatResult r = adiabat_integrate(vdw, {"vdw_gas", 1.0, 30.0, 1.0}, 20.0, 100);
  auto first_integral = [](double e, double v) { return (e + 0.1 / v) * std::pow(v - 0.05, 1.0 / 1.5); };
  const double c0 = first_integral(30.0, 1.0);
  double err_vdw = 0;
  for (const auto& p : r.curve.samples) err_vdw = std::max(err_vdw, support::relative(first_integral(p.energy, p.volumes[0]), c0));
  const double elapsed = seconds_since(t0);
  o.require(err_ideal <= 1e-9, "ideal U error " + fmt("%.3g", err_ideal));
  o.require(r.curve.samples.size() == 100, "curve has " + std::to_string(r.curve.samples.size()) + " points");
  o.require(err_vdw <= 1e-8, "first integral drift " + fmt("%.3g", err_vdw));
  o.require(elapsed < 5, "runtime " + fmt("%.2f", elapsed) + " s");
  o.detail = "U(8) = " + fmt("%.12g", u) + ", vdW drift " + fmt("%.2e", err_vdw) + (o.detail.empty() ? "" : " (" + o.detail + ")");
  return o;
}

Outcome entropy_integral() {
  Outcome o;
  const DerivedSpace& ideal = reduced().at("ideal_reduced");
  const double ds = ideal.entropy.per_unit(1.0, 2.0) - ideal.entropy.per_unit(1.0, 1.0);
  const double err_ln2 = std::abs(ds - std::log(2.0));
  double err_rect = 0;
  for (const char* id : {"ideal_reduced", "vdw_gas"}) {
    const DerivedSpace& d = reduced().at(id);
    const Domain& dom = d.system->domain();
    auto g = support::rng(3);
    for (int i = 0; i < 20; ++i) {
      const double ta = support::uniform(g, dom.theta_min, dom.theta_max);
      const double tb = support::uniform(g, dom.theta_min, dom.theta_max);
      const double va = support::log_uniform(g, dom.v_min, dom.v_max);
      const double vb = support::log_uniform(g, dom.v_min, dom.v_max);
      const double rect = support::rectangle_delta_s(*d.system, ta, va, tb, vb);
      err_rect = std::max(err_rect, std::abs(rect - (d.entropy.per_unit(tb, vb) - d.entropy.per_unit(ta, va))));
    }
  }
  o.require(err_ln2 <= 1e-8, "ln 2 error " + fmt("%.3g", err_ln2));
  o.require(err_rect <= 1e-8, "rectangle error " + fmt("%.3g", err_rect));
  o.detail = "ln 2 err " + fmt("%.2e", err_ln2) + ", rectangle err " + fmt("%.2e", err_rect) + (o.detail.empty() ? "" : " (" + o.detail + ")");
  return o;
}

Outcome reconstruction() {
  Outcome o;
  const auto t0 = Clock::now();
  const OperationalOracle oracle(reduced());
  const SimpleState x0{"ideal_reduced", 1.0, 1.0, 1.0};
  const SimpleState x1{"ideal_reduced", 1.0, std::exp(1.0), 1.0};
  const double mid = reconstruct_entropy(oracle, x0, x1, {"ideal_reduced", 1.0, std::exp(0.5), 1.0}).entropy;
  o.require(std::abs(mid - 0.5) <= 1e-3, "midpoint lambda " + fmt("%.6g", mid));

  const SimpleState y0{"vdw_gas", 1.0, 10.0, 1.0};
  const SimpleState y1{"vdw_gas", 1.0, 40.0, 5.0};
  auto closed = [](const SimpleState& x) { return support::vdw_entropy(x.u(), x.v()); };
  auto g = support::rng(404);
  std::vector<SimpleState> targets;
  for (int i = 0; i < 100; ++i) targets.push_back(middle_state(g, "vdw_gas", 1.0));
  std::vector<ReconstructionResult> results(targets.size());
  parallel_for(targets.size(), [&](std::size_t i) { results[i] = reconstruct_entropy(oracle, y0, y1, targets[i]); });
  double worst = 0, worst_gap = -kInf, least_gap = kInf;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double expected = (closed(targets[i]) - closed(y0)) / (closed(y1) - closed(y0));
    worst = std::max(worst, std::abs(results[i].entropy - expected));
    worst_gap = std::max(worst_gap, results[i].gap());
    least_gap = std::min(least_gap, results[i].gap());
  }
  const double elapsed = seconds_since(t0);
  o.require(worst <= 1e-3, "max |lambda - lambda_integral| " + fmt("%.3g", worst));
  o.require(worst_gap <= 2e-4, "max gap " + fmt("%.3g", worst_gap));
  o.require(elapsed < 120, "runtime " + fmt("%.1f", elapsed) + " s");
  o.detail = "midpoint " + fmt("%.6f", mid) + ", max dev " + fmt("%.2e", worst) + ", gap in [" + fmt("%.2e", least_gap) + ", " + fmt("%.2e", worst_gap) + "]" +
             ", " + fmt("%.1f", elapsed) + " s" + (o.detail.empty() ? "" : " (" + o.detail + ")");
  return o;
}

Outcome theta_invariance() {
  Outcome o;
  OracleOptions low, high;
  low.theta_fraction = 0.2;
  high.theta_fraction = 0.8;
  const OperationalOracle a(reduced(), low), b(reduced(), high);
  auto g = support::rng(5);
  int mismatches = 0, same_theta = 0;
  for (int i = 0; i < 200; ++i) {
    CompoundState x, y;
    switch (i % 4) {
      case 0:
        x = {middle_state(g, "ideal_reduced", 1.0)};
        y = {middle_state(g, "ideal_reduced", 1.0)};
        break;
      case 1:
        x = {middle_state(g, "vdw_gas", 1.0)};
        y = {middle_state(g, "vdw_gas", 1.0)};
        break;
      case 2: {
        const double l = support::uniform(g, 0.2, 0.8);
        x = {middle_state(g, "ideal_reduced", l), middle_state(g, "ideal_reduced", 1 - l)};
        y = {middle_state(g, "ideal_reduced", 1.0)};
        break;
      }
      default:
        x = {middle_state(g, "ideal_reduced", 1.0), middle_state(g, "vdw_gas", 0.5)};
        y = {middle_state(g, "vdw_gas", 0.5), middle_state(g, "ideal_reduced", 1.0)};
    }
    const AccessVerdict va = a.compare(x, y), vb = b.compare(x, y);
    if (va.theta_star == vb.theta_star) ++same_theta;
    if (va.forward != vb.forward || va.backward != vb.backward) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  o.require(same_theta == 0, std::to_string(same_theta) + " queries used one theta star");
  o.detail = "200 queries, " + std::to_string(mismatches) + " mismatches" + (o.detail.empty() ? "" : " (" + o.detail + ")");
  return o;
}

Outcome axiom_suite() {
  Outcome o;
  const auto t0 = Clock::now();
  const SpaceSet spaces = derive_all(support::bundled());
  const OperationalOracle oracle(spaces);
  SamplerConfig cfg;
  cfg.seed = 42;
  cfg.samples = 100;
  const AxiomReport r = run_suites(spaces, oracle, all_suites(), cfg);
  int pass = 0, fail = 0, nt = 0;
  for (const auto& law : r.laws) {
    if (law.status == LawStatus::Pass) ++pass;
    if (law.status == LawStatus::NotTested) ++nt;
    if (law.status == LawStatus::Fail) {
      ++fail;
      o.require(false, law.name + " on " + law.subject);
    }
  }
  SpaceSet stub;
  const EosSpec spec = stubs::reference_gas();
  stub.emplace(spec.id, derive_space(SimpleSystem(spec)));
  const bool hole = check_general_axioms(stub, spec.id, stubs::transitivity_hole(), cfg).find("A2 transitivity")->status ==
                    LawStatus::Fail;
  const bool ch = check_CH(stub, spec.id, stubs::ComponentwiseRelation{}, cfg).find("CH pairs")->status == LawStatus::Fail;
  const double elapsed = seconds_since(t0);
  o.require(hole, "transitivity hole not detected");
  o.require(ch, "componentwise order not detected");
  o.require(elapsed < 60, "runtime " + fmt("%.1f", elapsed) + " s");
  o.detail = std::to_string(pass) + " pass, " + std::to_string(fail) + " fail, " + std::to_string(nt) +
             " not tested; stubs detected: " + (hole && ch ? "both" : "no") + ", " + fmt("%.1f", elapsed) + " s" +
             (o.detail.empty() ? "" : " (" + o.detail + ")");
  return o;
}

Outcome equilibration() {
  Outcome o;
  const SimpleSystem sys(support::bundled("ideal_gas"));
  const JoinComponent pair[] = {{&sys, 1.0, 0.01}, {&sys, 1.0, 0.01}};
  const Equilibrium eq = equilibrate(pair, sys.energy(300, 0.01) + sys.energy(500, 0.01));
  const double err = support::relative(eq.theta, 400);
  o.require(err <= 1e-9, "theta " + fmt("%.12g", eq.theta));

  const SimpleSystem& a = *reduced().at("vdw_gas").system;
  const SimpleSystem& b = *reduced().at("ideal_reduced").system;
  auto g = support::rng(7);
  int wrong = 0;
  for (int i = 0; i < 100; ++i) {
    double ta = support::uniform(g, 2, 90), tb = support::uniform(g, 2, 90);
    if (std::abs(ta - tb) < 1e-3) tb += 1;
    const double va = support::log_uniform(g, 0.2, 500), vb = support::log_uniform(g, 0.01, 500);
    const double la = support::uniform(g, 0.2, 3), lb = support::uniform(g, 0.2, 3);
    const double ua = la * a.energy(ta, va), ub = lb * b.energy(tb, vb);
    const JoinComponent comps[] = {{&a, la, la * va}, {&b, lb, lb * vb}};
    const Equilibrium e = equilibrate(comps, ua + ub);
    // Both spaces have T = theta.
    const bool hot_loses = ta > tb ? e.energies[0] < ua : e.energies[1] < ub;
    if (!hot_loses) ++wrong;
  }
  o.require(wrong == 0, std::to_string(wrong) + " joins with the wrong flow");
  o.detail = "theta " + fmt("%.9f", eq.theta) + " K, " + std::to_string(100 - wrong) + "/100 joins hot to cold" +
             (o.detail.empty() ? "" : " (" + o.detail + ")");
  return o;
}

Outcome calibration() {
  Outcome o;
  EosSpec dense = support::bundled("vdw_gas");
  dense.id = "dense_vdw";
  dense.constants = {{"R", 1.0}, {"c", 2.5}, {"a", 0.3}, {"b", 0.02}};
  const SpaceSet spaces = derive_all({support::bundled("ideal_reduced"), support::bundled("vdw_gas"), dense});
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"ideal_reduced", "vdw_gas"}, {"vdw_gas", "dense_vdw"}, {"ideal_reduced", "dense_vdw"}};
  std::vector<QuadEdge> edges;
  double worst_quad = 0;
  std::uint64_t seed = 42;
  for (const auto& [x, y] : pairs) {
    const CalibratorQuad q = find_calibrators(spaces, x, y, seed++);
    worst_quad = std::max(worst_quad, std::abs(q.residual));
    edges.push_back(quad_edge(q, spaces));
  }
  // The first quad also against the closed forms: both gases have R = 1.
  const CalibratorQuad q = find_calibrators(spaces, "ideal_reduced", "vdw_gas", 42);
  const double d1 = support::ideal_entropy(q.x1.u(), q.x1.v()) - support::ideal_entropy(q.x0.u(), q.x0.v());
  const double d2 = support::vdw_entropy(q.y1.u(), q.y1.v()) - support::vdw_entropy(q.y0.u(), q.y0.v());
  const double closed = support::relative(d2, d1);

  const std::vector<std::string> ids{"ideal_reduced", "vdw_gas", "dense_vdw"};
  const ScaleAssignment base = calibrate_scales(ids, edges, ids[0]);
  double rerooting = 0;
  for (const auto& root : ids) {
    const ScaleAssignment other = calibrate_scales(ids, edges, root);
    const double factor = base.a.at(root);
    for (const auto& id : ids) rerooting = std::max(rerooting, support::relative(factor * other.a.at(id), base.a.at(id)));
  }
  o.require(worst_quad <= 1e-6, "quad residual " + fmt("%.3g", worst_quad));
  o.require(closed <= 1e-6, "closed-form increment mismatch " + fmt("%.3g", closed));
  o.require(base.worst_cycle_residual <= 1e-6, "cycle residual " + fmt("%.3g", base.worst_cycle_residual));
  o.require(rerooting <= 1e-9, "re-rooting spread " + fmt("%.3g", rerooting));
  o.detail = "quad residual " + fmt("%.2e", worst_quad) + ", cycle " + fmt("%.2e", base.worst_cycle_residual) +
             ", re-rooting " + fmt("%.2e", rerooting) + (o.detail.empty() ? "" : " (" + o.detail + ")");
  return o;
}

double min_cycle_weight(int n, const std::vector<std::vector<double>>& w) {
  double best = kInf;
  std::vector<bool> used(n, false);
  std::function<void(int, int, double)> dfs = [&](int start, int at, double sum) {
    for (int next = start; next < n; ++next) {
      if (at == next || !std::isfinite(w[at][next])) continue;
      if (next == start) {
        best = std::min(best, sum + w[at][next]);
      } else if (!used[next]) {
        used[next] = true;
        dfs(start, next, sum + w[at][next]);
        used[next] = false;
      }
    }
  };
  for (int s = 0; s < n; ++s) {
    used[s] = true;
    dfs(s, s, 0.0);
    used[s] = false;
  }
  return best;
}

Outcome mixing_network() {
  Outcome o;
  const SpaceSet spaces = derive_all(load_registry(support::data_dir() / "mixing_registry.json"));
  std::map<std::string, double> a;
  for (const auto& [id, _] : spaces) a[id] = 1.0;
  const ProcessGraph mix = load_process_graph(support::data_dir() / "mixing_graph.json");
  const MismatchMatrix F = compute_F(mix.processes, spaces, a);
  const double increase = F.at("gas_a + gas_b", "2 mix_ab");
  o.require(std::abs(increase - 2 * std::log(2.0)) <= 1e-6, "mixing increase " + fmt("%.9g", increase));
  const auto audit = check_axiom_M(F);
  const bool flagged = audit.size() == 1 && audit[0].first == "gas_a + gas_b" && audit[0].second == "2 mix_ab";
  o.require(flagged, "one-way edge not flagged");

  const ProcessGraph neg = load_process_graph(support::data_dir() / "negative_cycle_graph.json");
  std::string cycle;
  try {
    assign_additive_constants(compute_F(neg.processes, spaces, a));
    o.require(false, "negative cycle accepted");
  } catch (const Infeasible& e) {
    for (const auto& n : e.cycle()) cycle += (cycle.empty() ? "" : " -> ") + n;
    o.require(e.cycle().size() >= 2 && e.cycle_sum() < 0, "cycle not listed");
  }

  auto g = support::rng(9);
  int agree = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(g() % 8);
    std::vector<std::string> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back("n" + std::to_string(i));
    std::vector<std::vector<double>> w(n, std::vector<double>(n, kInf));
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j || support::uniform(g, 0, 1) > 0.35) continue;
        w[i][j] = std::round(support::uniform(g, -1.5, 4.0) * 8) / 8;
        edges.push_back({nodes[i], nodes[j], w[i][j]});
      }
    }
    const bool enumerated_feasible = !(min_cycle_weight(n, w) < 0);
    bool solved_feasible = true;
    try {
      assign_additive_constants(mismatch_from_edges(nodes, edges));
    } catch (const Infeasible&) {
      solved_feasible = false;
    }
    if (enumerated_feasible == solved_feasible) ++agree;
  }
  o.require(agree == 50, std::to_string(50 - agree) + " graphs disagree");
  o.detail = "increase " + fmt("%.7f", increase) + ", cycle [" + cycle + "], M audit " + (flagged ? "flagged" : "silent") +
             ", " + std::to_string(agree) + "/50 graphs agree" + (o.detail.empty() ? "" : " (" + o.detail + ")");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Planck linearity", planck_linearity},
      {"adiabat ODE", adiabat_ode},
      {"entropy integral", entropy_integral},
      {"order-theoretic reconstruction", reconstruction},
      {"theta-star invariance", theta_invariance},
      {"axiom suite", axiom_suite},
      {"equilibration", equilibration},
      {"calibration", calibration},
      {"mixing network", mixing_network},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

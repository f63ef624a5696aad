#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "adiabat/axioms.hpp"
#include "adiabat/calibration.hpp"
#include "adiabat/error.hpp"
#include "adiabat/oracle.hpp"
#include "adiabat/parallel.hpp"
#include "adiabat/registry.hpp"
#include "adiabat/thermo.hpp"
#include "json.hpp"

namespace adiabat::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
  std::string registry;
  std::uint64_t seed = 42;
  std::optional<double> tol;
  std::string out = ".";
  std::string units;
};

/// Nonzero exit with a message for stderr.
struct Exit {
  int code;
  std::string message;
};

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void csv_row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << g17(v);
    first = false;
  }
  os << '\n';
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<EosSpec> load_specs(const RunConfig& cfg) {
  std::vector<EosSpec> specs = cfg.registry.empty() ? bundled_registry() : load_registry(cfg.registry);
  if (!cfg.units.empty()) {
    std::erase_if(specs, [&](const EosSpec& s) { return s.units != cfg.units; });
  }
  return specs;
}

std::string registry_name(const RunConfig& cfg) {
  return cfg.registry.empty() ? "bundled registry" : "'" + cfg.registry + "'";
}

const EosSpec& find_spec(const std::vector<EosSpec>& specs, const std::string& id,
                         const RunConfig& cfg) {
  for (const auto& s : specs) {
    if (s.id == id) return s;
  }
  std::string msg = "unknown space '" + id + "' in " + registry_name(cfg);
  if (!cfg.units.empty()) msg += " with units " + cfg.units;
  throw InputError(msg);
}

void require_valid(const std::vector<EosSpec>& specs) {
  for (const auto& s : specs) {
    const ValidationReport r = validate_spec(s);
    if (!r.ok()) throw Exit{kInputError, "space '" + s.id + "' failed validation:\n" + r.to_string()};
  }
}

fs::path output_file(const RunConfig& cfg, const std::string& name) {
  const fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + cfg.out + "': " + ec.message());
  return dir / name;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write '" + path.string() + "'");
  return os;
}

std::pair<double, double> parse_pair(const std::string& text, const std::string& what) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InputError(what + " must be U,V (got '" + text + "')");
  try {
    std::size_t p1 = 0, p2 = 0;
    const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
    const double u = std::stod(a, &p1);
    const double v = std::stod(b, &p2);
    if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("trailing");
    return {u, v};
  } catch (const std::logic_error&) {
    throw InputError(what + " must be two numbers U,V (got '" + text + "')");
  }
}

std::vector<std::pair<double, double>> read_targets(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::pair<double, double>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
               line.end());
    if (line.empty() || line[0] == '#') continue;
    if (out.empty() && lineno == 1 && !std::isdigit(static_cast<unsigned char>(line[0])) &&
        line[0] != '-' && line[0] != '.' && line[0] != '+') {
      continue;  // header
    }
    out.push_back(parse_pair(line, "'" + path + "' line " + std::to_string(lineno)));
  }
  return out;
}

double require_positive(double x, const char* what) {
  if (!(x > 0) || !std::isfinite(x)) throw Exit{kUsage, std::string(what) + " must be positive"};
  return x;
}

// ---------------------------------------------------------------------------

int cmd_derive(const RunConfig& cfg, const std::string& id, int points, std::ostream& out) {
  const auto specs = load_specs(cfg);
  const EosSpec& spec = find_spec(specs, id, cfg);
  require_valid({spec});
  const SimpleSystem sys(spec);
  const DerivedSpace d = derive_space(sys);
  const Domain& dom = spec.domain;
  const int n = std::max(points, 2);
  auto theta_at = [&](int i) { return dom.theta_min + (dom.theta_max - dom.theta_min) * i / (n - 1); };
  auto v_at = [&](int j) {
    if (dom.v_min > 0) return dom.v_min * std::pow(dom.v_max / dom.v_min, static_cast<double>(j) / (n - 1));
    return dom.v_min + (dom.v_max - dom.v_min) * j / (n - 1);
  };
  const fs::path tpath = output_file(cfg, id + "_temperature.csv");
  {
    auto os = open_out(tpath);
    os << "theta,T\n";
    for (int i = 0; i < n; ++i) {
      const double th = std::clamp(theta_at(i), dom.theta_min, dom.theta_max);
      csv_row(os, {th, (*d.temperature)(th)});
    }
  }
  const fs::path spath = output_file(cfg, id + "_entropy.csv");
  {
    auto os = open_out(spath);
    os << "theta,V,U,S\n";
    for (int i = 0; i < n; ++i) {
      const double th = std::clamp(theta_at(i), dom.theta_min, dom.theta_max);
      for (int j = 0; j < n; ++j) {
        const double v = std::clamp(v_at(j), dom.v_min, dom.v_max);
        csv_row(os, {th, v, sys.energy(th, v), d.entropy.per_unit(th, v)});
      }
    }
  }
  out << tpath.string() << '\n' << spath.string() << '\n';
  return kOk;
}

int cmd_reconstruct(const RunConfig& cfg, const std::string& id, const std::string& x0_text,
                    const std::string& x1_text, const std::string& targets_path, std::ostream& out) {
  const auto specs = load_specs(cfg);
  const EosSpec& spec = find_spec(specs, id, cfg);
  require_valid({spec});
  const auto [u0, v0] = parse_pair(x0_text, "--x0");
  const auto [u1, v1] = parse_pair(x1_text, "--x1");
  const auto targets = read_targets(targets_path);
  SpaceSet spaces;
  spaces.emplace(id, derive_space(SimpleSystem(spec)));
  const DerivedSpace& d = spaces.at(id);
  const OperationalOracle oracle(spaces);
  const SimpleState x0{id, 1.0, u0, v0}, x1{id, 1.0, u1, v1};
  const AccessVerdict ref = oracle.compare(CompoundState{x0}, CompoundState{x1});
  if (!ref.strict_forward()) {
    throw Exit{kPrecondition, "X0 does not strictly precede X1 (verdict: " + ref.label() + ")"};
  }
  ReconstructOptions opts;
  opts.tol = cfg.tol.value_or(opts.tol);
  opts.assume_strict_reference = true;
  const double s0 = d.entropy.raw(x0), s1 = d.entropy.raw(x1);
  std::vector<ReconstructionResult> results(targets.size());
  std::vector<std::string> errors(targets.size());
  parallel_for(targets.size(), [&](std::size_t i) {
    const SimpleState x{id, 1.0, targets[i].first, targets[i].second};
    try {
      results[i] = reconstruct_entropy(oracle, x0, x1, x, opts);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!errors[i].empty()) {
      throw InputError("target " + std::to_string(i + 1) + " (U=" + g17(targets[i].first) +
                       ", V=" + g17(targets[i].second) + "): " + errors[i]);
    }
  }
  const fs::path path = output_file(cfg, id + "_reconstruction.csv");
  auto os = open_out(path);
  os << "U,V,lambda_minus,lambda_plus,gap,lambda_integral\n";
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const SimpleState x{id, 1.0, targets[i].first, targets[i].second};
    const ReconstructionResult& r = results[i];
    csv_row(os, {x.energy, x.volume, r.lambda_minus, r.lambda_plus, r.gap(),
                 (d.entropy.raw(x) - s0) / (s1 - s0)});
  }
  out << path.string() << '\n';
  return kOk;
}

LawResult injected(const std::string& name, const SamplerConfig& scfg) {
  if (name == "transitivity") {
    SpaceSet s;
    const EosSpec spec = stubs::reference_gas();
    s.emplace(spec.id, derive_space(SimpleSystem(spec)));
    const auto rel = stubs::transitivity_hole();
    LawResult r = *check_general_axioms(s, spec.id, rel, scfg).find("A2 transitivity");
    r.subject = "stub:transitivity-hole";
    return r;
  }
  if (name == "ch") {
    SpaceSet s;
    const EosSpec spec = stubs::reference_gas();
    s.emplace(spec.id, derive_space(SimpleSystem(spec)));
    const stubs::ComponentwiseRelation rel;
    LawResult r = *check_CH(s, spec.id, rel, scfg).find("CH pairs");
    r.subject = "stub:componentwise-order";
    return r;
  }
  if (name == "s2") {
    LawResult r = check_pressure_regularity(SimpleSystem(stubs::discontinuous_pressure()), scfg);
    r.subject = "stub:discontinuous-pressure";
    return r;
  }
  if (name == "t5") {
    const SpaceSet s = derive_all(stubs::disjoint_theta_pair());
    const OperationalOracle oracle(s);
    LawResult r = *check_thermal_axioms(s, "cold_gas", "hot_gas", oracle, scfg).find("T5 temperature range");
    r.subject = "stub:disjoint-temperatures";
    return r;
  }
  throw Exit{kUsage, "unknown injection '" + name + "' (expected transitivity, ch, s2 or t5)"};
}

int cmd_verify(const RunConfig& cfg, const std::vector<std::string>& suite_names,
               const std::vector<std::string>& injections, int samples, bool timing,
               std::ostream& out) {
  std::vector<Suite> suites;
  for (const auto& name : suite_names) {
    if (name == "all") {
      for (Suite s : all_suites()) suites.push_back(s);
      continue;
    }
    try {
      suites.push_back(parse_suite(name));
    } catch (const InputError& e) {
      throw Exit{kUsage, e.what()};
    }
  }
  if (suite_names.empty()) suites = all_suites();
  std::sort(suites.begin(), suites.end());
  suites.erase(std::unique(suites.begin(), suites.end()), suites.end());
  SamplerConfig scfg;
  scfg.seed = cfg.seed;
  scfg.samples = samples;
  if (cfg.tol) scfg.reconstruction_tol = *cfg.tol;
  try {
    validate(scfg);
  } catch (const InputError& e) {
    throw Exit{kUsage, e.what()};
  }
  std::vector<LawResult> extra;
  for (const auto& name : injections) extra.push_back(injected(name, scfg));

  const auto specs = load_specs(cfg);
  if (specs.empty()) throw InputError("no spaces selected from " + registry_name(cfg));
  require_valid(specs);
  const SpaceSet spaces = derive_all(specs);
  const OperationalOracle oracle(spaces);
  AxiomReport report = run_suites(spaces, oracle, suites, scfg);
  report.laws.insert(report.laws.end(), extra.begin(), extra.end());

  const ReportFormat fmt{timing};
  const fs::path tpath = output_file(cfg, "verify_report.txt");
  const fs::path jpath = output_file(cfg, "verify_report.json");
  open_out(tpath) << report.to_text(fmt);
  open_out(jpath) << report.to_json(fmt);
  out << report.to_text(fmt);
  return report.passed() ? kOk : kFailed;
}

void require_known_spaces(const ProcessGraph& graph, const SpaceSet& spaces) {
  for (const auto& p : graph.processes) {
    for (const auto* side : {&p.source, &p.target}) {
      for (const auto& c : side->components) {
        if (!spaces.contains(c.space)) {
          throw InputError("process '" + p.id + "' uses unknown space '" + c.space + "'");
        }
      }
    }
  }
}

json monotonicity_json(const MonotonicityReport& mono) {
  json checks = json::array();
  for (const auto& p : mono.processes) {
    checks.push_back({{"id", p.id},
                      {"source_entropy", p.source_entropy},
                      {"target_entropy", p.target_entropy},
                      {"increase", p.target_entropy - p.source_entropy},
                      {"monotone", p.monotone}});
  }
  return checks;
}

int cmd_calibrate(const RunConfig& cfg, const std::string& graph_path, const std::string& check_path,
                  const std::string& reference, std::ostream& out, std::ostream& err) {
  const auto specs = load_specs(cfg);
  require_valid(specs);
  const SpaceSet spaces = derive_all(specs);
  ProcessGraph graph, check;
  if (!graph_path.empty()) graph = load_process_graph(graph_path);
  if (!check_path.empty()) check = load_process_graph(check_path);
  require_known_spaces(graph, spaces);
  require_known_spaces(check, spaces);

  // Multiplicative constants per units group: a star of quads from the
  // group's reference plus one redundant quad closing a cycle.
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& [id, d] : spaces) groups[d.system->spec().units].push_back(id);
  json doc;
  json quads_json = json::array();
  std::map<std::string, double> a;
  double worst = 0;
  CalibrationOptions copts;
  if (cfg.tol) copts.residual_tol = *cfg.tol;
  std::uint64_t seed = cfg.seed;
  for (auto& [units, ids] : groups) {
    std::string ref = ids.front();
    if (!reference.empty() && std::find(ids.begin(), ids.end(), reference) != ids.end()) ref = reference;
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& id : ids) {
      if (id != ref) pairs.emplace_back(ref, id);
    }
    std::vector<std::string> others;
    for (const auto& id : ids) {
      if (id != ref) others.push_back(id);
    }
    if (others.size() >= 2) pairs.emplace_back(others[0], others[1]);
    std::vector<QuadEdge> edges;
    for (const auto& [first, second] : pairs) {
      CalibratorQuad q;
      try {
        q = find_calibrators(spaces, first, second, seed++, copts);
      } catch (const NoBracket& e) {
        throw Exit{kFailed, std::string("calibration failed: ") + e.what()};
      }
      const QuadEdge e = quad_edge(q, spaces);
      edges.push_back(e);
      quads_json.push_back({{"first", first},
                            {"second", second},
                            {"residual", q.residual},
                            {"theta_star", q.theta_star},
                            {"delta_first", e.delta_first},
                            {"delta_second", e.delta_second},
                            {"x0", {q.x0.energy, q.x0.volume}},
                            {"x1", {q.x1.energy, q.x1.volume}},
                            {"y0", {q.y0.energy, q.y0.volume}},
                            {"y1", {q.y1.energy, q.y1.volume}}});
    }
    ScaleAssignment sa;
    try {
      sa = calibrate_scales(ids, edges, ref, 1e-6);
    } catch (const InconsistentQuads& e) {
      throw Exit{kFailed, e.what()};
    }
    worst = std::max(worst, sa.worst_cycle_residual);
    a.insert(sa.a.begin(), sa.a.end());
    doc["reference"][units] = ref;
  }
  doc["a"] = a;
  doc["quads"] = quads_json;
  doc["worst_cycle_residual"] = worst;

  std::vector<std::string> extra = graph.nodes;
  for (const auto& [id, _] : spaces) extra.push_back(id);
  for (const auto& p : check.processes) {
    extra.push_back(signature_node(p.source));
    extra.push_back(signature_node(p.target));
  }
  const MismatchMatrix F = compute_F(graph.processes, spaces, a, extra);
  doc["nodes"] = F.nodes;
  json rows = json::array();
  for (const auto& row : F.F) {
    json r = json::array();
    for (double x : row) r.push_back(finite_or_null(x));
    rows.push_back(r);
  }
  doc["F"] = rows;
  doc["negative_cycle"] = F.negative_cycle;
  json audit = json::array();
  for (const auto& [from, to] : check_axiom_M(F)) audit.push_back({{"from", from}, {"sink", to}});
  doc["axiom_M"] = audit;

  int code = kOk;
  ConstantAssignment ca;
  try {
    ca = assign_additive_constants(F, reference.empty() || !std::count(F.nodes.begin(), F.nodes.end(), reference)
                                          ? ""
                                          : reference);
    doc["feasible"] = true;
    doc["B"] = ca.B;
    json gaps = json::array();
    for (const auto& g : ca.gaps) {
      gaps.push_back({{"first", g.first},
                      {"second", g.second},
                      {"lower", finite_or_null(g.lower)},
                      {"upper", finite_or_null(g.upper)}});
    }
    doc["gaps"] = gaps;
    const MonotonicityReport mono = verify_universal_monotonicity(graph.processes, spaces, a, ca);
    doc["monotonicity"] = monotonicity_json(mono);
    doc["monotone"] = mono.passed();
    const MonotonicityReport checked = verify_universal_monotonicity(check.processes, spaces, a, ca);
    if (!check_path.empty()) {
      doc["check"] = monotonicity_json(checked);
      doc["check_monotone"] = checked.passed();
    }
    for (const auto* r : {&mono, &checked}) {
      for (const auto& p : r->processes) {
        if (p.monotone) continue;
        err << "process '" << p.id << "' decreases the universal entropy from " << g17(p.source_entropy)
            << " to " << g17(p.target_entropy) << '\n';
        code = kFailed;
      }
    }
  } catch (const Infeasible& e) {
    doc["feasible"] = false;
    doc["cycle"] = e.cycle();
    doc["cycle_sum"] = e.cycle_sum();
    err << e.what() << '\n';
    code = kFailed;
  }
  const fs::path path = output_file(cfg, "calibration.json");
  open_out(path) << doc.dump(2) << '\n';
  out << path.string() << '\n';
  if (!audit.empty()) {
    for (const auto& s : audit) {
      out << "sink: " << s["sink"].get<std::string>() << " reachable from "
          << s["from"].get<std::string>() << " without return\n";
    }
  }
  return code;
}

int cmd_trace(const RunConfig& cfg, const std::string& id, const std::string& kind,
              const std::string& start_text, double v_end, int points, std::ostream& out) {
  const auto specs = load_specs(cfg);
  const EosSpec& spec = find_spec(specs, id, cfg);
  require_valid({spec});
  const auto [u0, v0] = parse_pair(start_text, "--start");
  const SimpleSystem sys(spec);
  const DerivedSpace d = derive_space(sys);
  const Domain& dom = spec.domain;
  const int n = v_end == v0 ? 1 : std::max(points, 2);
  const double theta0 = sys.theta_from_energy(u0, v0);
  const fs::path path = output_file(cfg, id + "_" + kind + ".csv");
  std::ostringstream os;
  os << "V,U,P,S,T\n";
  if (kind == "adiabat") {
    const AdiabatResult r = adiabat_integrate(sys, SimpleState{id, 1.0, u0, v0}, v_end, n == 1 ? 0 : n);
    double guess = theta0;
    for (const auto& s : r.curve.samples) {
      const double v = s.volumes.front();
      guess = sys.theta_from_energy(s.energy, v, guess);
      csv_row(os, {v, s.energy, sys.pressure(guess, v), d.entropy.per_unit(guess, v), (*d.temperature)(guess)});
    }
  } else {
    if (v_end < dom.v_min || v_end > dom.v_max) {
      throw LeftDomain("isotherm of '" + id + "' leaves the domain at V=" +
                           g17(v_end < dom.v_min ? dom.v_min : dom.v_max) + ", U=" +
                           g17(sys.energy(theta0, v_end < dom.v_min ? dom.v_min : dom.v_max)),
                       v_end, 0);
    }
    for (const auto& p : isotherm_trace(d, theta0, v0, v_end, n)) csv_row(os, {p.v, p.u, p.p, p.s, p.t});
  }
  open_out(path) << os.str();
  out << path.string() << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Derive temperature and entropy from equations of state, query adiabatic "
               "accessibility, verify the axioms and calibrate entropy constants."};
  app.name("adiabat");
  app.require_subcommand(1);
  app.fallthrough(true);

  RunConfig cfg;
  double tol = 0;
  app.add_option("--registry", cfg.registry, "Registry JSON file (default: bundled registry)");
  app.add_option("--seed", cfg.seed, "Random seed");
  auto* tol_opt = app.add_option("--tol", tol, "Tolerance override");
  app.add_option("--out", cfg.out, "Output directory");
  app.add_option("--units", cfg.units, "Restrict to spaces with these units")
      ->check(CLI::IsMember({"si", "reduced"}));

  std::string space, kind, x0, x1, targets, graph, check_graph, reference, start;
  int points = 51, trace_points = 101, samples = 100;
  double v_end = 0;
  bool timing = false;
  std::vector<std::string> suites, injections;

  auto* derive = app.add_subcommand("derive", "Write temperature and entropy grids of one space");
  derive->add_option("space", space, "Space id")->required();
  derive->add_option("--points", points, "Grid points per axis")->check(CLI::Range(2, 100000));

  auto* recon = app.add_subcommand("reconstruct", "Reconstruct entropy from the order relation");
  recon->add_option("space", space, "Space id")->required();
  recon->add_option("--x0", x0, "Reference state U,V")->required();
  recon->add_option("--x1", x1, "Reference state U,V")->required();
  recon->add_option("--targets", targets, "CSV file of U,V rows")->required();

  auto* verify = app.add_subcommand("verify", "Run the axiom suites");
  verify->add_option("--suite", suites, "general, convexity, simple, thermal, ch, temperature or all");
  verify->add_option("--inject", injections, "Add a defective stub: transitivity, ch, s2, t5");
  verify->add_option("--samples", samples, "Samples per law");
  verify->add_flag("--timing", timing, "Include elapsed times in the reports");

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate entropy constants");
  calibrate->add_option("--graph", graph, "Process graph JSON file");
  calibrate->add_option("--check", check_graph, "Process graph verified against the calibrated constants");
  calibrate->add_option("--reference", reference, "Reference space");

  auto* trace = app.add_subcommand("trace", "Write an adiabat or isotherm as CSV");
  trace->add_option("space", space, "Space id")->required();
  trace->add_option("kind", kind, "adiabat or isotherm")->required()->check(CLI::IsMember({"adiabat", "isotherm"}));
  trace->add_option("--start", start, "Start state U,V")->required();
  trace->add_option("--to", v_end, "Final volume")->required();
  trace->add_option("--points", trace_points, "Number of rows")->check(CLI::Range(1, 1000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "adiabat: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*tol_opt) cfg.tol = require_positive(tol, "--tol");
    if (*derive) return cmd_derive(cfg, space, points, out);
    if (*recon) return cmd_reconstruct(cfg, space, x0, x1, targets, out);
    if (*verify) return cmd_verify(cfg, suites, injections, samples, timing, out);
    if (*calibrate) return cmd_calibrate(cfg, graph, check_graph, reference, out, err);
    if (*trace) return cmd_trace(cfg, space, kind, start, v_end, trace_points, out);
  } catch (const Exit& e) {
    err << "adiabat: " << e.message << '\n';
    return e.code;
  } catch (const ReferenceNotStrict& e) {
    err << "adiabat: " << e.what() << '\n';
    return kPrecondition;
  } catch (const Error& e) {
    err << "adiabat: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "adiabat: " << e.what() << '\n';
    return kInputError;
  }
  return kUsage;
}

}  // namespace adiabat::cli

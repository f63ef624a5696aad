#include "adiabat/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <random>
#include <set>

#include "adiabat/error.hpp"

namespace adiabat {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

const DerivedSpace& space_of(const SpaceSet& spaces, const std::string& id) {
  auto it = spaces.find(id);
  if (it == spaces.end()) throw InputError("unknown space '" + id + "'");
  return it->second;
}

SimpleState state_at(const DerivedSpace& d, double theta, double v) {
  return {d.id(), 1.0, d.system->energy(theta, v), v};
}

}  // namespace

CalibratorQuad find_calibrators(const SpaceSet& spaces, const std::string& first,
                                const std::string& second, std::uint64_t seed,
                                const CalibrationOptions& opts) {
  const DerivedSpace& g1 = space_of(spaces, first);
  const DerivedSpace& g2 = space_of(spaces, second);
  std::mt19937_64 rng(seed);
  const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;

  const EosSpec& s1 = g1.system->spec();
  const double theta1 = s1.theta_ref * std::pow(s1.domain.theta_max / s1.theta_ref, 0.1 + 0.2 * r);
  const SimpleState x0 = state_at(g1, s1.theta_ref, s1.v_ref);
  const SimpleState x1 = state_at(g1, theta1, s1.v_ref);
  if (first == second) return {x0, x1, x0, x1, 0.0, 0.0};

  const EosSpec& s2 = g2.system->spec();
  const Domain& d1 = s1.domain;
  const Domain& d2 = s2.domain;
  if (std::max(d1.theta_min, d2.theta_min) >= std::min(d1.theta_max, d2.theta_max)) {
    throw NoBracket("spaces '" + first + "' and '" + second + "' share no temperature range");
  }
  const SimpleState y0 = state_at(g2, s2.theta_ref, s2.v_ref);
  const double t_hi = s2.domain.theta_max;
  auto y1_at = [&](double t) {
    return state_at(g2, std::min(t_hi, s2.theta_ref * std::pow(t_hi / s2.theta_ref, t)), s2.v_ref);
  };

  OperationalOracle oracle(spaces, opts.oracle);
  const CompoundState rhs{x1, y0};
  auto margin = [&](double t) {
    return oracle.compare(CompoundState{x0, y1_at(t)}, rhs).forward_relative();
  };
  // Reachable ranges grow monotonically along the isochore, so the two ends
  // bound the common interval of every member of the family. When the hot
  // end shares no temperature with the rest, the family is cut shorter.
  double top = 1.0;
  double theta_star = 0;
  std::string reason;
  for (; top > 1e-3; top *= 0.7) {
    double lo = 0, hi = -1;
    try {
      const auto lo_end = oracle.admissible_thetas(CompoundState{x0, y1_at(0.0)}, rhs);
      const auto hi_end = oracle.admissible_thetas(CompoundState{x0, y1_at(top)}, rhs);
      lo = std::max(lo_end.first, hi_end.first);
      hi = std::min(lo_end.second, hi_end.second);
    } catch (const UnreachableTemperature& e) {
      reason = e.what();
      continue;
    }
    if (!(lo <= hi)) {
      reason = "adiabats share no common temperature (lower " + fmt(lo) + " > upper " + fmt(hi) + ")";
      continue;
    }
    theta_star = lo + opts.oracle.theta_fraction * (hi - lo);
    break;
  }
  if (!(top > 1e-3)) {
    throw NoBracket("no common temperature for calibration of '" + first + "' and '" + second + "': " + reason);
  }
  OracleOptions fixed = opts.oracle;
  fixed.theta_star = theta_star;
  oracle = oracle.with_options(fixed);

  for (const auto& [a, b, which] : {std::tuple{x0, x1, first}, std::tuple{y0, y1_at(top), second}}) {
    if (!oracle.compare(CompoundState{a}, CompoundState{b}).strict_forward()) {
      throw NoBracket("reference states of '" + which + "' are not strictly ordered");
    }
  }
  const double m0 = margin(0.0);
  const double m1 = margin(top);
  if (!(m0 > 0 && m1 < 0)) {
    throw NoBracket("isochore of '" + second + "' never crosses equivalence (margins " + fmt(m0) +
                    ", " + fmt(m1) + ")");
  }
  const double t = numerics::find_root(margin, 0.0, top, opts.t_tol, 200);
  CalibratorQuad quad{x0, x1, y0, y1_at(t), std::abs(margin(t)), theta_star};
  if (quad.residual > opts.residual_tol) {
    throw NonConvergence("calibrator residual " + fmt(quad.residual) + " above tolerance");
  }
  return quad;
}

QuadEdge quad_edge(const CalibratorQuad& quad, const SpaceSet& spaces) {
  const EntropyFn& s1 = space_of(spaces, quad.x0.space).entropy;
  const EntropyFn& s2 = space_of(spaces, quad.y0.space).entropy;
  return {quad.x0.space, quad.y0.space, s1.raw(quad.x1) - s1.raw(quad.x0),
          s2.raw(quad.y1) - s2.raw(quad.y0)};
}

ScaleAssignment calibrate_scales(const std::vector<std::string>& spaces,
                                 const std::vector<QuadEdge>& quads, const std::string& reference,
                                 double tol) {
  ScaleAssignment out;
  if (spaces.empty()) return out;
  out.reference = reference.empty() ? spaces.front() : reference;
  if (std::find(spaces.begin(), spaces.end(), out.reference) == spaces.end()) {
    throw InputError("reference space '" + out.reference + "' is not calibrated");
  }
  struct Arc {
    std::string to;
    double ratio;  // a_to = a_from * ratio
    std::size_t quad;
  };
  std::map<std::string, std::vector<Arc>> adj;
  for (std::size_t q = 0; q < quads.size(); ++q) {
    const QuadEdge& e = quads[q];
    if (!(e.delta_first != 0 && e.delta_second != 0)) {
      throw InputError("quad between '" + e.first + "' and '" + e.second + "' has zero increment");
    }
    adj[e.first].push_back({e.second, e.delta_first / e.delta_second, q});
    adj[e.second].push_back({e.first, e.delta_second / e.delta_first, q});
  }
  std::map<std::string, std::string> parent;
  std::map<std::string, std::size_t> parent_quad;
  std::deque<std::string> queue{out.reference};
  out.a[out.reference] = 1.0;
  std::set<std::size_t> tree;
  while (!queue.empty()) {
    const std::string node = queue.front();
    queue.pop_front();
    for (const Arc& arc : adj[node]) {
      if (out.a.contains(arc.to)) continue;
      out.a[arc.to] = out.a[node] * arc.ratio;
      parent[arc.to] = node;
      tree.insert(arc.quad);
      queue.push_back(arc.to);
    }
  }
  std::vector<std::string> missing;
  for (const auto& id : spaces) {
    if (!out.a.contains(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string msg = "calibration graph does not reach:";
    for (const auto& id : missing) msg += " " + id;
    throw DisconnectedGraph(msg);
  }
  auto path_to_root = [&](std::string node) {
    std::vector<std::string> p{node};
    while (parent.contains(node)) {
      node = parent[node];
      p.push_back(node);
    }
    return p;
  };
  for (std::size_t q = 0; q < quads.size(); ++q) {
    if (tree.contains(q)) continue;
    const QuadEdge& e = quads[q];
    const double lhs = out.a[e.first] * e.delta_first;
    const double rhs = out.a[e.second] * e.delta_second;
    const double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
    out.worst_cycle_residual = std::max(out.worst_cycle_residual, rel);
    if (rel > tol) {
      // Cycle: first -> ... -> common ancestor -> ... -> second -> first.
      auto pa = path_to_root(e.first);
      auto pb = path_to_root(e.second);
      while (pa.size() > 1 && pb.size() > 1 && pa[pa.size() - 2] == pb[pb.size() - 2]) {
        pa.pop_back();
        pb.pop_back();
      }
      std::vector<std::string> cycle(pa.begin(), pa.end());
      for (auto it = pb.rbegin() + 1; it != pb.rend(); ++it) cycle.push_back(*it);
      cycle.push_back(e.first);
      std::string msg = "quads disagree by " + fmt(rel) + " around cycle";
      for (const auto& id : cycle) msg += " " + id;
      throw InconsistentQuads(msg, cycle);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string signature_node(const CompoundState& c) {
  std::string out;
  for (const auto& [id, m] : c.matter()) {
    if (!out.empty()) out += " + ";
    if (m != 1.0) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g ", m);
      out += buf;
    }
    out += id;
  }
  return out;
}

double calibrated_entropy(const CompoundState& c, const SpaceSet& spaces,
                          const std::map<std::string, double>& a) {
  double s = 0;
  for (const auto& x : c.components) {
    auto it = a.find(x.space);
    const double scale = it == a.end() ? 1.0 : it->second;
    s += scale * space_of(spaces, x.space).entropy.raw(x);
  }
  return s;
}

std::size_t MismatchMatrix::index(const std::string& node) const {
  auto it = std::find(nodes.begin(), nodes.end(), node);
  if (it == nodes.end()) throw InputError("unknown node '" + node + "'");
  return static_cast<std::size_t>(it - nodes.begin());
}

MismatchMatrix mismatch_from_edges(std::vector<std::string> nodes,
                                   const std::vector<WeightedEdge>& edges) {
  MismatchMatrix m;
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  m.nodes = std::move(nodes);
  const std::size_t n = m.nodes.size();
  m.F.assign(n, std::vector<double>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) m.F[i][i] = 0.0;
  for (const auto& e : edges) {
    const std::size_t i = m.index(e.from), j = m.index(e.to);
    if (i == j) {
      if (e.weight < 0) m.negative_cycle = true;
      continue;
    }
    m.F[i][j] = std::min(m.F[i][j], e.weight);
  }
  auto closed = m.F;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (closed[i][k] == kInf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (closed[k][j] == kInf) continue;
        closed[i][j] = std::min(closed[i][j], closed[i][k] + closed[k][j]);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (closed[i][i] < 0) m.negative_cycle = true;
  }
  if (!m.negative_cycle) m.F = std::move(closed);
  return m;
}

MismatchMatrix compute_F(const std::vector<ProcessDecl>& graph, const SpaceSet& spaces,
                         const std::map<std::string, double>& a,
                         const std::vector<std::string>& extra_nodes) {
  std::vector<std::string> nodes = extra_nodes;
  std::vector<WeightedEdge> edges;
  for (const auto& p : graph) {
    const std::string from = signature_node(p.source);
    const std::string to = signature_node(p.target);
    nodes.push_back(from);
    nodes.push_back(to);
    edges.push_back({from, to,
                     calibrated_entropy(p.target, spaces, a) - calibrated_entropy(p.source, spaces, a)});
  }
  return mismatch_from_edges(std::move(nodes), edges);
}

std::vector<std::pair<std::string, std::string>> check_axiom_M(const MismatchMatrix& F) {
  std::vector<std::pair<std::string, std::string>> sinks;
  const std::size_t n = F.nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && F.F[i][j] < kInf && F.F[j][i] == kInf) sinks.emplace_back(F.nodes[i], F.nodes[j]);
    }
  }
  return sinks;
}

ConstantAssignment assign_additive_constants(const MismatchMatrix& F, const std::string& reference) {
  ConstantAssignment out;
  const std::size_t n = F.nodes.size();
  if (n == 0) return out;
  out.reference = reference.empty() ? F.nodes.front() : reference;
  const std::size_t ref = F.index(out.reference);

  // B(i) - B(j) <= F(i, j) is the arc j -> i with weight F(i, j); a virtual
  // source at distance 0 reaches every node.
  struct Arc {
    std::size_t from, to;
    double w;
  };
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && F.F[i][j] < kInf) arcs.push_back({j, i, F.F[i][j]});
    }
  }
  std::vector<double> dist(n, 0.0);
  std::vector<std::size_t> pred(n, n);
  std::size_t changed = n;
  for (std::size_t pass = 0; pass < n; ++pass) {
    changed = n;
    for (const Arc& a : arcs) {
      if (dist[a.from] + a.w < dist[a.to]) {
        dist[a.to] = dist[a.from] + a.w;
        pred[a.to] = a.from;
        changed = a.to;
      }
    }
    if (changed == n) break;
  }
  if (changed != n) {
    std::size_t x = changed;
    for (std::size_t i = 0; i < n; ++i) x = pred[x];
    std::vector<std::size_t> rev{x};
    for (std::size_t y = pred[x]; y != x; y = pred[y]) rev.push_back(y);
    std::reverse(rev.begin(), rev.end());
    // rev follows arcs; report the cycle in mismatch order (reverse of arcs).
    std::vector<std::string> cycle;
    double sum = 0;
    for (std::size_t k = rev.size(); k-- > 0;) cycle.push_back(F.nodes[rev[k]]);
    cycle.push_back(cycle.front());
    for (std::size_t k = 0; k + 1 < cycle.size(); ++k) sum += F.at(cycle[k], cycle[k + 1]);
    std::string msg = "negative mismatch cycle (sum " + fmt(sum) + "):";
    for (const auto& id : cycle) msg += " " + id;
    out.feasible = false;
    throw Infeasible(msg, cycle, sum);
  }
  const double shift = dist[ref];
  for (std::size_t i = 0; i < n; ++i) out.B[F.nodes[i]] = dist[i] - shift + 0.0;
  out.B[out.reference] = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || F.F[i][j] == kInf) continue;
      const double diff = out.B[F.nodes[i]] - out.B[F.nodes[j]];
      if (diff > F.F[i][j] + 1e-9 * std::max(1.0, std::abs(F.F[i][j]))) {
        throw Error("additive constants violate the mismatch bound for " + F.nodes[i] + ", " +
                    F.nodes[j]);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double lower = -F.F[j][i];
      const double upper = F.F[i][j];
      if ((F.F[i][j] < kInf || F.F[j][i] < kInf) && lower < upper) {
        out.gaps.push_back({F.nodes[i], F.nodes[j], lower, upper});
      }
    }
  }
  return out;
}

bool MonotonicityReport::passed() const {
  return std::all_of(processes.begin(), processes.end(),
                     [](const ProcessCheck& p) { return p.monotone; });
}

MonotonicityReport verify_universal_monotonicity(const std::vector<ProcessDecl>& graph,
                                                 const SpaceSet& spaces,
                                                 const std::map<std::string, double>& a,
                                                 const ConstantAssignment& constants, double tol) {
  auto offset = [&](const CompoundState& c) {
    auto it = constants.B.find(signature_node(c));
    return it == constants.B.end() ? 0.0 : it->second;
  };
  MonotonicityReport report;
  for (const auto& p : graph) {
    ProcessCheck check;
    check.id = p.id;
    check.source_entropy = calibrated_entropy(p.source, spaces, a) + offset(p.source);
    check.target_entropy = calibrated_entropy(p.target, spaces, a) + offset(p.target);
    check.monotone = check.source_entropy <= check.target_entropy + tol;
    report.processes.push_back(check);
  }
  return report;
}

}  // namespace adiabat

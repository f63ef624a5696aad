#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "adiabat/oracle.hpp"
#include "adiabat/thermo.hpp"

namespace adiabat {

/// X0 strictly precedes X1 in the first space, Y0 strictly precedes Y1 in the
/// second, and (X0, Y1) is adiabatically equivalent to (X1, Y0).
struct CalibratorQuad {
  SimpleState x0, x1, y0, y1;
  /// Relative energy margin of the equivalence at the returned Y1.
  double residual = 0;
  double theta_star = 0;
};

struct CalibrationOptions {
  double residual_tol = 1e-6;
  /// Bisection resolution on the isochore parameter.
  double t_tol = 1e-14;
  OracleOptions oracle{};
};

/// Searches an isochore of the second space for Y1 with (X0, Y1) ~ (X1, Y0).
/// Throws NoBracket when the family never crosses equivalence (including
/// spaces with no common temperature).
CalibratorQuad find_calibrators(const SpaceSet& spaces, const std::string& first,
                                const std::string& second, std::uint64_t seed,
                                const CalibrationOptions& opts = {});

/// Raw entropy increments of one quad: S1(X1) - S1(X0) and S2(Y1) - S2(Y0).
struct QuadEdge {
  std::string first, second;
  double delta_first = 0;
  double delta_second = 0;
};

QuadEdge quad_edge(const CalibratorQuad& quad, const SpaceSet& spaces);

struct ScaleAssignment {
  std::string reference;
  std::map<std::string, double> a;
  /// Largest relative mismatch among redundant quads.
  double worst_cycle_residual = 0;
};

/// Multiplicative constants with a_reference = 1 and a1 dS1 = a2 dS2 along
/// a spanning tree of the quads; redundant quads are checked to `tol`.
/// Empty reference means the first id. Throws DisconnectedGraph,
/// InconsistentQuads.
ScaleAssignment calibrate_scales(const std::vector<std::string>& spaces,
                                 const std::vector<QuadEdge>& quads,
                                 const std::string& reference = "", double tol = 1e-6);

// ---------------------------------------------------------------------------

struct ProcessDecl {
  std::string id;
  CompoundState source;
  CompoundState target;
  std::string note;
};

/// Node label of a compound state's space: "gas_a + gas_b", "2 mix_ab".
std::string signature_node(const CompoundState& c);

/// Sum of a_space * raw entropy over the components.
double calibrated_entropy(const CompoundState& c, const SpaceSet& spaces,
                          const std::map<std::string, double>& a);

constexpr double kInf = std::numeric_limits<double>::infinity();

struct MismatchMatrix {
  std::vector<std::string> nodes;
  std::vector<std::vector<double>> F;  // +inf when unreachable
  /// A negative directed cycle was found during closure.
  bool negative_cycle = false;

  std::size_t index(const std::string& node) const;  // InputError if absent
  double at(const std::string& from, const std::string& to) const { return F[index(from)][index(to)]; }
};

struct WeightedEdge {
  std::string from, to;
  double weight;
};

/// All-pairs shortest paths (Floyd-Warshall) over the given edges, keeping
/// the smallest weight per edge; F(n, n) = 0. With a negative cycle the
/// closure is undefined and F holds the edge weights only.
MismatchMatrix mismatch_from_edges(std::vector<std::string> nodes,
                                   const std::vector<WeightedEdge>& edges);

/// Edge weight min over processes of S(target) - S(source), calibrated with
/// `a` and B = 0, then shortest-path closure. `extra_nodes` adds isolated
/// nodes.
MismatchMatrix compute_F(const std::vector<ProcessDecl>& graph, const SpaceSet& spaces,
                         const std::map<std::string, double>& a,
                         const std::vector<std::string>& extra_nodes = {});

/// Pairs (from, to) with F(from, to) finite but F(to, from) infinite; `to` is
/// a sink.
std::vector<std::pair<std::string, std::string>> check_axiom_M(const MismatchMatrix& F);

struct GapEntry {
  std::string first, second;
  double lower;  // -F(second, first)
  double upper;  // F(first, second)
};

struct ConstantAssignment {
  std::string reference;
  std::map<std::string, double> B;
  bool feasible = true;
  std::vector<GapEntry> gaps;
};

/// Solves B(n) - B(m) <= F(n, m) by Bellman-Ford from a virtual source and
/// pins `reference` (default: first node) to 0. Throws Infeasible listing a
/// negative cycle.
ConstantAssignment assign_additive_constants(const MismatchMatrix& F,
                                             const std::string& reference = "");

struct ProcessCheck {
  std::string id;
  double source_entropy = 0;
  double target_entropy = 0;
  bool monotone = true;
};

struct MonotonicityReport {
  std::vector<ProcessCheck> processes;
  bool passed() const;
};

/// For each process, S(source) + B(source node) <= S(target) + B(target
/// node) + tol with calibrated entropies.
MonotonicityReport verify_universal_monotonicity(const std::vector<ProcessDecl>& graph,
                                                 const SpaceSet& spaces,
                                                 const std::map<std::string, double>& a,
                                                 const ConstantAssignment& constants,
                                                 double tol = 1e-9);

}  // namespace adiabat

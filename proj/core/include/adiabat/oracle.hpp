#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adiabat/eos.hpp"
#include "adiabat/numerics.hpp"
#include "adiabat/thermo.hpp"

namespace adiabat {

/// Ordered list of scaled simple-system states (possibly of different spaces).
struct CompoundState {
  std::vector<SimpleState> components;

  CompoundState() = default;
  CompoundState(std::initializer_list<SimpleState> c) : components(c) {}
  explicit CompoundState(std::vector<SimpleState> c) : components(std::move(c)) {}

  /// Total matter content per space id.
  std::map<std::string, double> matter() const;
  CompoundState scaled(double factor) const;
  /// Cartesian product (A, B).
  CompoundState joined(const CompoundState& other) const;
  bool empty() const { return components.empty(); }
};

/// Merges scaled copies of the same intensive state (relative 1e-12), drops
/// zero-scale components and sorts by space id, then (u, v). Idempotent.
CompoundState canonicalize(const CompoundState& c);

struct AccessVerdict {
  bool forward = false;   // A precedes B
  bool backward = false;  // B precedes A
  /// Signed energy margins U_target - U_predicted (NaN when not computed).
  double forward_margin = 0;
  double backward_margin = 0;
  /// Energy magnitudes the margins are relative to.
  double forward_scale = 1;
  double backward_scale = 1;
  double theta_star = 0;

  bool equivalent() const { return forward && backward; }
  bool strict() const { return forward != backward; }
  bool strict_forward() const { return forward && !backward; }
  bool strict_backward() const { return backward && !forward; }
  bool incomparable() const { return !forward && !backward; }
  double forward_relative() const { return forward_margin / forward_scale; }
  std::string label() const;
};

/// Anything that answers accessibility queries between compound states.
class AccessRelation {
 public:
  virtual ~AccessRelation() = default;
  virtual AccessVerdict compare(const CompoundState& a, const CompoundState& b) const = 0;
  /// A precedes B; may skip the backward computation.
  virtual bool precedes(const CompoundState& a, const CompoundState& b) const {
    return compare(a, b).forward;
  }
};

struct OracleOptions {
  /// Relative energy tolerance of the final comparison.
  double energy_tol = 1e-9;
  /// Verdicts with margin inside strict_factor * energy_tol count as equivalent.
  double strict_factor = 10.0;
  /// Position of Theta* inside the common reachable temperature interval.
  double theta_fraction = 0.5;
  /// Explicit Theta*; must lie inside the common interval.
  std::optional<double> theta_star;
  /// Matter-content agreement required between the two sides.
  double signature_tol = 1e-12;
  numerics::OdeOptions ode{};
};

/// Operational accessibility: slide every component along its adiabat to a
/// common temperature, form the equilibrium thermal join, then follow the
/// join's adiabat to the other side's work coordinates and compare energies.
class OperationalOracle : public AccessRelation {
 public:
  explicit OperationalOracle(std::vector<std::shared_ptr<const SimpleSystem>> systems,
                             OracleOptions opts = {});
  explicit OperationalOracle(const std::vector<DerivedSpace>& spaces, OracleOptions opts = {});
  explicit OperationalOracle(const SpaceSet& spaces, OracleOptions opts = {});

  AccessVerdict compare(const CompoundState& a, const CompoundState& b) const override;
  bool precedes(const CompoundState& a, const CompoundState& b) const override;

  /// Common temperature interval reachable by every component of a and b.
  /// Throws UnreachableTemperature when empty.
  std::pair<double, double> admissible_thetas(const CompoundState& a, const CompoundState& b) const;

  const OracleOptions& options() const { return opts_; }
  OperationalOracle with_options(OracleOptions opts) const;
  const SimpleSystem& system(const std::string& id) const;

 private:
  struct Slot;
  struct Aligned;
  Aligned align(const CompoundState& a, const CompoundState& b) const;
  double pick_theta(const Aligned& al) const;
  AccessVerdict run(const CompoundState& a, const CompoundState& b, bool both) const;

  std::map<std::string, std::shared_ptr<const SimpleSystem>, std::less<>> systems_;
  OracleOptions opts_;
};

struct ReconstructionResult {
  double lambda_minus = 0;  // sup { l : ((1-l) X0, l X1) precedes X }
  double lambda_plus = 0;   // inf { l : X precedes ((1-l) X0, l X1) }
  double entropy = 0;       // midpoint estimate
  int iterations_minus = 0;
  int iterations_plus = 0;
  double gap() const { return lambda_plus - lambda_minus; }
};

struct ReconstructOptions {
  double tol = 1e-4;
  int max_iterations = 60;
  int max_expansions = 40;
  /// Skip the X0 strictly-precedes X1 precondition check.
  bool assume_strict_reference = false;
};

/// The reference mixture ((1-l) X0, l X1) compared against X. Negative
/// coefficients move their component to the other side.
std::pair<CompoundState, CompoundState> mixture_query(const SimpleState& x0, const SimpleState& x1,
                                                      const SimpleState& x, double lambda);

/// Entropy of X in the units fixed by S(X0) = 0, S(X1) = 1, using only the
/// order relation. Throws ReferenceNotStrict, NonConvergence.
ReconstructionResult reconstruct_entropy(const AccessRelation& rel, const SimpleState& x0,
                                         const SimpleState& x1, const SimpleState& x,
                                         const ReconstructOptions& opts = {});

/// lambda_plus - lambda_minus from two independent bisections.
double comparability_gap(const AccessRelation& rel, const SimpleState& x0, const SimpleState& x1,
                         const SimpleState& x, const ReconstructOptions& opts = {});

}  // namespace adiabat

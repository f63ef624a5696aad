#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "adiabat/oracle.hpp"
#include "adiabat/thermo.hpp"

namespace adiabat {

struct SamplerConfig {
  std::uint64_t seed = 42;
  int samples = 100;
  /// Fraction of each (log-)axis kept clear of the domain edges.
  double margin = 0.25;
  /// Bound on the scale-free difference quotient of P.
  double lipschitz_bound = 1e6;
  /// Bisection resolution of the reconstructions inside CH.
  double reconstruction_tol = 1e-4;
  /// Temperature resolution of the zeroth-law and flow checks (relative).
  double temperature_tol = 1e-6;
  std::vector<double> epsilon_ladder{1e-1, 1e-2, 1e-3, 1e-4};
};

/// Throws InputError unless samples >= 1 and 0 <= margin < 0.5.
void validate(const SamplerConfig& cfg);

enum class LawStatus { Pass, Fail, NotTested };

std::string to_string(LawStatus s);

struct Witness {
  std::string text;
  std::vector<CompoundState> states;
};

struct LawResult {
  std::string name;
  std::string subject;
  LawStatus status = LawStatus::NotTested;
  int trials = 0;
  int failures = 0;
  /// Largest violation among failures.
  double worst = 0;
  Witness witness;
  double elapsed = 0;  // seconds
  std::string note;
};

struct ReportFormat {
  bool include_timing = false;
};

struct AxiomReport {
  std::uint64_t seed = 0;
  int samples = 0;
  std::vector<LawResult> laws;

  bool passed() const;
  const LawResult* find(const std::string& name, const std::string& subject = "") const;
  void append(const AxiomReport& other);
  std::string to_text(ReportFormat fmt = {}) const;
  std::string to_json(ReportFormat fmt = {}) const;
};

/// One-line rendering of a compound state with full coordinates.
std::string describe(const CompoundState& c);

/// Per-law random stream derived from the suite seed and the law name.
std::mt19937_64 law_stream(std::uint64_t seed, const std::string& law);

/// Log-uniform (linear when the lower bound is not positive) draws of
/// (theta, v) inside the domain shrunk by `margin` on each side.
class StateSampler {
 public:
  StateSampler(const SimpleSystem& sys, double margin);
  double theta(std::mt19937_64& rng) const;
  double volume(std::mt19937_64& rng) const;
  SimpleState state(std::mt19937_64& rng, double scale = 1.0) const;
  SimpleState at(double theta, double v, double scale = 1.0) const;

 private:
  const SimpleSystem* sys_;
  double t_lo_, t_hi_, v_lo_, v_hi_;
  bool t_log_, v_log_;
};

double uniform01(std::mt19937_64& rng);

/// A1-A6 on one space.
AxiomReport check_general_axioms(const SpaceSet& spaces, const std::string& space,
                                 const AccessRelation& rel, const SamplerConfig& cfg);

/// A7: concavity of the derived entropy and forward-sector midpoints.
AxiomReport check_convexity(const SpaceSet& spaces, const std::string& space,
                            const AccessRelation& rel, const SamplerConfig& cfg);

/// S1, S2 (finite, Lipschitz pressure), nested forward sectors; S3 NOT-TESTED.
AxiomReport check_simple_axioms(const SpaceSet& spaces, const std::string& space,
                                const AccessRelation& rel, const SamplerConfig& cfg);

/// Lipschitz part of S2 on random segments of the sampling box.
LawResult check_pressure_regularity(const SimpleSystem& sys, const SamplerConfig& cfg);

/// T1-T5 on a pair of spaces.
AxiomReport check_thermal_axioms(const SpaceSet& spaces, const std::string& first,
                                 const std::string& second, const AccessRelation& rel,
                                 const SamplerConfig& cfg);

/// Comparison hypothesis on (1-l) G x l G plus comparability gaps of
/// reconstructions.
AxiomReport check_CH(const SpaceSet& spaces, const std::string& space, const AccessRelation& rel,
                     const SamplerConfig& cfg);

/// T > 0, 1/T = dS/dU, equal T iff no flow, heat flows hot to cold.
AxiomReport check_temperature_theorem(const SpaceSet& spaces, const std::string& space,
                                      const AccessRelation& rel, const SamplerConfig& cfg);

enum class Suite { General, Convexity, Simple, Thermal, CH, Temperature };

std::string to_string(Suite s);
/// Throws InputError for unknown names; "all" is not a suite.
Suite parse_suite(const std::string& name);
std::vector<Suite> all_suites();

/// Runs the selected suites on every space (thermal: every pair sharing a
/// units tag), laws in parallel.
AxiomReport run_suites(const SpaceSet& spaces, const AccessRelation& rel,
                       const std::vector<Suite>& suites, const SamplerConfig& cfg);

// ---------------------------------------------------------------------------
// Deliberately defective relations and systems used to show that the checks
// detect failures.

namespace stubs {

/// Orders compound states by sum_i l_i (1.5 ln(u_i) + ln(v_i)). Differences
/// below `blind` (ties included) are reported incomparable; forward jumps
/// longer than `reach` are refused, which breaks transitivity.
class ScoreRelation : public AccessRelation {
 public:
  ScoreRelation(double blind, double reach) : blind_(blind), reach_(reach) {}
  AccessVerdict compare(const CompoundState& a, const CompoundState& b) const override;
  static double score(const CompoundState& c);

 private:
  double blind_;
  double reach_;
};

inline ScoreRelation transitivity_hole(double reach = 2.0) { return {0.0, reach}; }
inline ScoreRelation comparability_hole(double blind) { return {blind, 1e300}; }

/// Componentwise order on total (U, V): (1, 2) and (2, 1) are incomparable.
class ComponentwiseRelation : public AccessRelation {
 public:
  AccessVerdict compare(const CompoundState& a, const CompoundState& b) const override;
};

/// Reduced ideal gas on theta in [0.5, 5], v in [0.1, 10].
EosSpec reference_gas();

/// Reduced ideal gases on theta in [1, 10] and [20, 100].
std::vector<EosSpec> disjoint_theta_pair();

/// Reduced ideal gas whose pressure jumps by a factor two at v = 1.
EosSpec discontinuous_pressure();

}  // namespace stubs

}  // namespace adiabat

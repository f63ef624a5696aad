#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adiabat/eos.hpp"
#include "adiabat/numerics.hpp"

namespace adiabat {

struct Anchor {
  double theta;
  double temperature;
};

/// Absolute temperature at `theta` from the empirical scale:
///   T = T0 exp( int_{theta0}^{theta} (dP/dtheta)_v / (P + (dU/dv)_theta) dtheta' )
/// evaluated at the probe volume `v_probe`. For a thermodynamically
/// consistent equation of state the result does not depend on `v_probe`.
/// Throws SingularIntegrand, QuadratureFailure, DomainError.
double planck_temperature(const SimpleSystem& sys, double theta, double v_probe, Anchor anchor,
                          double tol = 1e-12);

struct TableOptions {
  /// Midpoint refinement target for every table, relative to (1 + |value|).
  double interp_tol = 1e-11;
  /// Quadrature tolerance per table segment.
  double quad_tol = 1e-12;
  std::size_t max_nodes = 1 << 15;
  /// Nodes per axis of the tensor grid used for non-separable systems.
  std::size_t grid_2d = 97;
  /// Cell-centre error target for the tensor grid, relative to (1 + |value|).
  double interp_tol_2d = 1e-8;
  int max_doublings_2d = 3;
};

/// Tabulated T(theta) on an adaptively refined grid; monotone cubic between
/// nodes with exact nodal slopes T * planck_integrand.
class TemperatureMap {
 public:
  TemperatureMap() = default;
  TemperatureMap(std::string space, Anchor anchor, double v_probe, numerics::MonotoneCubic table);

  const std::string& space() const { return space_; }
  const Anchor& anchor() const { return anchor_; }
  double v_probe() const { return v_probe_; }

  double operator()(double theta) const { return table_(theta); }
  double derivative(double theta) const { return table_.derivative(theta); }
  /// Empirical temperature with T(theta) = t; OutOfRange outside the table.
  double theta_for(double t) const;
  double t_min() const { return table_.values().front(); }
  double t_max() const { return table_.values().back(); }
  std::span<const double> thetas() const { return table_.nodes(); }
  std::span<const double> temperatures() const { return table_.values(); }

 private:
  std::string space_;
  Anchor anchor_{0, 0};
  double v_probe_ = 0;
  numerics::MonotoneCubic table_;
};

TemperatureMap build_temperature_map(const SimpleSystem& sys, const TableOptions& opts = {});

/// Per-unit entropy from integrating dS = dU/T + P/T dV along the canonical
/// path: isotherm theta_ref from v_ref to v, then isochore from theta_ref to
/// theta. Additive (B) and multiplicative (a) constants enter only through
/// `of()`: S(lambda X) = lambda (a s(X) + B).
class EntropyFn {
 public:
  EntropyFn() = default;

  const std::string& space() const { return space_; }

  /// Raw per-unit entropy at (theta, v) (includes reference_entropy).
  /// DomainError outside the rectangle.
  double per_unit(double theta, double v) const;
  /// Per-unit entropy at per-unit energy u and volume v.
  double per_unit_energy(double u, double v) const;
  /// Calibrated extensive entropy of a scaled state.
  double of(const SimpleState& x) const;
  /// Extensive entropy with a = 1, B = 0.
  double raw(const SimpleState& x) const { return x.scale * per_unit_energy(x.u(), x.v()); }
  double temperature(double theta) const { return (*tmap_)(theta); }

  double scale_a() const { return scale_a_; }
  double offset_b() const { return offset_b_; }
  void set_constants(double a, double b) {
    scale_a_ = a;
    offset_b_ = b;
  }
  bool separable() const { return separable_; }
  const SimpleSystem& system() const { return *sys_; }

 private:
  friend EntropyFn derive_entropy(std::shared_ptr<const SimpleSystem>,
                                  std::shared_ptr<const TemperatureMap>, const TableOptions&);
  std::string space_;
  std::shared_ptr<const SimpleSystem> sys_;
  std::shared_ptr<const TemperatureMap> tmap_;
  double s_ref_ = 0;
  bool separable_ = true;
  numerics::MonotoneCubic isotherm_;  // v -> integral along theta_ref
  numerics::MonotoneCubic isochore_;  // theta -> integral along v_ref (separable case)
  numerics::BicubicHermite coupled_;  // (theta, v) -> isochore integral (general case)
  double scale_a_ = 1.0;
  double offset_b_ = 0.0;
};

EntropyFn derive_entropy(std::shared_ptr<const SimpleSystem> sys,
                         std::shared_ptr<const TemperatureMap> tmap, const TableOptions& opts = {});

/// Everything derived for one space; immutable once built.
struct DerivedSpace {
  std::shared_ptr<const SimpleSystem> system;
  std::shared_ptr<const TemperatureMap> temperature;
  EntropyFn entropy;

  const std::string& id() const { return system->id(); }
  /// Absolute temperature of a (possibly scaled) state.
  double temperature_of(const SimpleState& x) const;
};

DerivedSpace derive_space(const SimpleSystem& sys, const TableOptions& opts = {});

using SpaceSet = std::map<std::string, DerivedSpace, std::less<>>;

/// Derives every spec, in parallel across spaces.
SpaceSet derive_all(const std::vector<EosSpec>& specs, const TableOptions& opts = {});

// ---------------------------------------------------------------------------

struct CurveSample {
  std::vector<double> volumes;  // extensive work coordinates
  double energy;                // extensive total energy
};

/// Sampled adiabat through a start state.
struct AdiabatCurve {
  std::string id;
  std::vector<CurveSample> samples;
};

struct AdiabatResult {
  double energy;  // extensive energy at the target work coordinates
  AdiabatCurve curve;
};

/// Integrates dU/dV = -P(U/lambda, V/lambda) from `start` to extensive volume
/// `v_target`. `samples` >= 2 records that many evenly spaced curve points.
/// Throws LeftDomain with the exit point, StiffnessFailure.
AdiabatResult adiabat_integrate(const SimpleSystem& sys, const SimpleState& start, double v_target,
                                int samples = 0, const numerics::OdeOptions& ode = {});

/// One slot of a thermal join: `scale` units of a space holding extensive
/// volume `volume`.
struct JoinComponent {
  const SimpleSystem* system;
  double scale;
  double volume;
};

struct Equilibrium {
  double theta;
  std::vector<double> energies;  // extensive, per component
};

/// Common empirical temperature of a thermal join holding total energy
/// `u_total`. Throws OutOfRange when no in-domain split exists.
Equilibrium equilibrate(std::span<const JoinComponent> comps, double u_total,
                        double theta_guess = -1.0);

/// Adiabat of a thermal join along the straight line from the components'
/// volumes to `target_volumes`; each right-hand-side evaluation re-solves the
/// equilibrium split. Returns the total energy at the target.
AdiabatResult join_adiabat_integrate(std::span<const JoinComponent> start, double u_start,
                                     std::span<const double> target_volumes, int samples = 0,
                                     const numerics::OdeOptions& ode = {});

/// Work-coordinate slide along the adiabat through (theta0, v0), parametrised
/// by empirical temperature: returns v where the adiabat meets theta_target.
/// Throws LeftDomain when the adiabat exits the v-range first.
double adiabat_volume_at(const SimpleSystem& sys, double theta0, double v0, double theta_target,
                         const numerics::OdeOptions& ode = {});

/// Range of empirical temperature swept by the adiabat through (theta0, v0)
/// inside the domain rectangle.
std::pair<double, double> adiabat_theta_range(const SimpleSystem& sys, double theta0, double v0,
                                               const numerics::OdeOptions& ode = {});

struct IsothermPoint {
  double v, u, p, s, t;
};

/// Per-unit tabulation at fixed theta over [v_lo, v_hi]. DomainError when
/// any point leaves the rectangle.
std::vector<IsothermPoint> isotherm_trace(const DerivedSpace& space, double theta, double v_lo,
                                          double v_hi, int samples);

}  // namespace adiabat

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adiabat/expr.hpp"

namespace adiabat {

/// Rectangle of empirical temperature and per-unit volume.
struct Domain {
  double theta_min = 0;
  double theta_max = 0;
  double v_min = 0;
  double v_max = 0;

  bool contains(double theta, double v) const {
    return theta >= theta_min && theta <= theta_max && v >= v_min && v <= v_max;
  }
  bool interior(double theta, double v) const {
    return theta > theta_min && theta < theta_max && v > v_min && v < v_max;
  }
};

/// A simple system declared by its energy U(theta, v) and pressure
/// P(theta, v) per unit matter.
struct EosSpec {
  std::string id;
  Expr energy;
  Expr pressure;
  Bindings constants;
  Domain domain;
  double theta_ref = 0;
  double v_ref = 0;
  double reference_entropy = 0;
  /// Absolute temperature assigned to theta_ref; theta_ref itself when unset.
  std::optional<double> anchor_temperature;
  /// Free-form unit tag ("si" or "reduced"); used only for filtering.
  std::string units = "reduced";
};

/// A state of a scaled copy of a simple system: extensive energy and volume
/// of `scale` units of matter.
struct SimpleState {
  std::string space;
  double scale = 1.0;
  double energy = 0.0;
  double volume = 0.0;

  double u() const { return energy / scale; }
  double v() const { return volume / scale; }
  SimpleState scaled(double factor) const { return {space, scale * factor, energy * factor, volume * factor}; }
};

/// Pointwise equation-of-state data at one (theta, v).
struct EosPoint {
  double u;
  double p;
  double u_theta;
  double u_v;
  double p_theta;
};

/// An EosSpec with constants bound and partial derivatives prepared.
/// Immutable; all member functions are safe to call concurrently.
class SimpleSystem {
 public:
  explicit SimpleSystem(EosSpec spec);

  const EosSpec& spec() const { return spec_; }
  const std::string& id() const { return spec_.id; }
  const Domain& domain() const { return spec_.domain; }

  /// Per-unit energy and pressure. Throw DomainError outside the rectangle.
  double energy(double theta, double v) const;
  double pressure(double theta, double v) const;

  /// Unique theta with U(theta, v) = u, |U(theta) - u| <= 1e-10 max(1, |u|)
  /// or better. Throws OutOfRange when u is outside [U(theta_min), U(theta_max)].
  double theta_from_energy(double u, double v, double theta_guess = -1.0) const;

  /// Unchecked evaluation (no rectangle test) for integrators.
  EosPoint at(double theta, double v) const;
  double u_raw(double theta, double v) const { return u_(theta, v); }
  double u_theta_raw(double theta, double v) const { return u_t_(theta, v); }
  double u_theta_v_raw(double theta, double v) const { return u_tv_(theta, v); }
  double p_raw(double theta, double v) const { return p_(theta, v); }
  /// Planck denominator P + (dU/dv) at fixed theta.
  double planck_denominator(double theta, double v) const { return p_(theta, v) + u_v_(theta, v); }
  /// Planck integrand (dP/dtheta) / (P + dU/dv).
  double planck_integrand(double theta, double v) const;

  /// True when dU/dtheta does not depend on v (the mixed partial folds to 0).
  bool separable() const { return separable_; }

  double anchor_temperature() const {
    return spec_.anchor_temperature.value_or(spec_.theta_ref);
  }

  const Expr& energy_expr() const { return u_expr_; }
  const Expr& pressure_expr() const { return p_expr_; }

 private:
  EosSpec spec_;
  Expr u_expr_, p_expr_;
  CompiledExpr u_, p_, u_t_, u_v_, p_t_, u_tv_;
  bool separable_ = false;
};

struct Violation {
  std::string check;
  std::string message;
  double theta = 0;
  double v = 0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

struct ValidationOptions {
  int grid = 16;  // per axis, >= 8
  double lipschitz_bound = 1e6;
};

using PressureField = std::function<double(double theta, double v)>;

/// Largest scale-free difference quotient |dP| / max|P| / |d(theta, v)|, with
/// coordinates normalised by the domain size, found by repeatedly bisecting
/// the segment toward the half with the larger jump.
double pressure_quotient(const PressureField& p, const Domain& d, double t0, double v0, double t1,
                         double v1, int levels = 40);

/// Grid check of the EosSpec invariants: ordered bounds, interior reference
/// point, dU/dtheta > 0, P > 0, P + dU/dv > 0, sampled Lipschitz bound on P.
/// Non-convex (U, V) regions are reported as warnings. Math errors become
/// violations; nothing is thrown.
ValidationReport validate_spec(const EosSpec& spec, const ValidationOptions& opts = {});

class SpaceRegistry {
 public:
  /// Throws InputError on duplicate ids.
  void add(EosSpec spec);
  const SimpleSystem& at(const std::string& id) const;  // InputError if absent
  std::shared_ptr<const SimpleSystem> ptr(const std::string& id) const;
  bool contains(const std::string& id) const { return spaces_.contains(id); }
  std::vector<std::string> ids() const;
  std::size_t size() const { return spaces_.size(); }

 private:
  std::map<std::string, std::shared_ptr<const SimpleSystem>> spaces_;
};

}  // namespace adiabat

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace adiabat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownFunction : public SyntaxError {
 public:
  UnknownFunction(const std::string& name, std::size_t offset)
      : SyntaxError("unknown function '" + name + "'", offset), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class MissingBinding : public Error {
 public:
  explicit MissingBinding(const std::string& name)
      : Error("no binding for '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Math domain violation (ln of non-positive value, division by zero,
/// evaluation outside a declared state-space rectangle).
class DomainError : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class SingularIntegrand : public Error {
 public:
  using Error::Error;
};

/// An integration path left the declared domain; carries the last in-domain
/// parameter value and state.
class LeftDomain : public Error {
 public:
  LeftDomain(const std::string& what, double exit_param, double exit_state)
      : Error(what), exit_param_(exit_param), exit_state_(exit_state) {}
  double exit_param() const noexcept { return exit_param_; }
  double exit_state() const noexcept { return exit_state_; }

 private:
  double exit_param_;
  double exit_state_;
};

/// A join adiabat crossed a temperature bound before reaching its target.
/// `bound_energy` is the join energy at the target work coordinates with
/// every component at that bound.
class TemperatureExit : public LeftDomain {
 public:
  TemperatureExit(const std::string& what, double exit_param, double exit_state, bool through_min,
                  double bound_energy)
      : LeftDomain(what, exit_param, exit_state), through_min_(through_min), bound_energy_(bound_energy) {}
  bool through_min() const noexcept { return through_min_; }
  double bound_energy() const noexcept { return bound_energy_; }

 private:
  bool through_min_;
  double bound_energy_;
};

class StiffnessFailure : public Error {
 public:
  using Error::Error;
};

class SignatureMismatch : public Error {
 public:
  using Error::Error;
};

class UnreachableTemperature : public Error {
 public:
  using Error::Error;
};

class ReferenceNotStrict : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class NoBracket : public Error {
 public:
  using Error::Error;
};

class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};

/// Redundant calibrator quads disagree around `cycle` (space ids).
class InconsistentQuads : public Error {
 public:
  InconsistentQuads(const std::string& what, std::vector<std::string> cycle)
      : Error(what), cycle_(std::move(cycle)) {}
  const std::vector<std::string>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

/// The difference constraints contain a negative cycle.
class Infeasible : public Error {
 public:
  Infeasible(const std::string& what, std::vector<std::string> cycle, double cycle_sum)
      : Error(what), cycle_(std::move(cycle)), cycle_sum_(cycle_sum) {}
  const std::vector<std::string>& cycle() const noexcept { return cycle_; }
  double cycle_sum() const noexcept { return cycle_sum_; }

 private:
  std::vector<std::string> cycle_;
  double cycle_sum_;
};

/// Malformed registry / process-graph input.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace adiabat

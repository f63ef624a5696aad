#include <benchmark/benchmark.h>

#include "adiabat/error.hpp"
#include "adiabat/expr.hpp"
#include "adiabat/oracle.hpp"
#include "adiabat/registry.hpp"
#include "adiabat/thermo.hpp"

namespace {

using namespace adiabat;

const EosSpec& spec(const std::string& id) {
  static const std::vector<EosSpec> specs = bundled_registry();
  for (const auto& s : specs) {
    if (s.id == id) return s;
  }
  throw InputError(id);
}

const SpaceSet& reduced_spaces() {
  static const SpaceSet spaces = derive_all({spec("ideal_reduced"), spec("vdw_gas")});
  return spaces;
}

void BM_CompiledEval(benchmark::State& state) {
  const Expr e = parse("R*theta/(v - b) - a/v^2").substitute({{"R", 1}, {"a", 0.1}, {"b", 0.05}});
  const std::string slots[] = {"theta", "v"};
  const CompiledExpr c(e, slots);
  double theta = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(c(theta, 1.5));
    theta += 1e-9;
  }
}
BENCHMARK(BM_CompiledEval);

void BM_PlanckTemperature(benchmark::State& state) {
  const SimpleSystem sys(spec("vdw_gas"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(planck_temperature(sys, 50.0, 1.0, {2.0, 2.0}));
  }
}
BENCHMARK(BM_PlanckTemperature);

void BM_DeriveSpace(benchmark::State& state) {
  const SimpleSystem sys(spec(state.range(0) == 0 ? "ideal_reduced" : "vdw_gas"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(derive_space(sys));
  }
}
BENCHMARK(BM_DeriveSpace)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EntropyLookup(benchmark::State& state) {
  const DerivedSpace& d = reduced_spaces().at("vdw_gas");
  double theta = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d.entropy.per_unit(theta, 3.0));
    theta = theta < 90 ? theta + 0.01 : 2.0;
  }
}
BENCHMARK(BM_EntropyLookup);

void BM_OracleCompare(benchmark::State& state) {
  const OperationalOracle oracle(reduced_spaces());
  const SimpleState a{"ideal_reduced", 1.0, 1.5, 1.0};
  const SimpleState b{"vdw_gas", 1.0, 2.9, 1.0};
  const CompoundState lhs{a, b};
  const CompoundState rhs{SimpleState{"ideal_reduced", 1.0, 1.8, 2.0}, SimpleState{"vdw_gas", 1.0, 2.8, 1.5}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle.compare(lhs, rhs));
  }
}
BENCHMARK(BM_OracleCompare)->Unit(benchmark::kMicrosecond);

void BM_Reconstruct(benchmark::State& state) {
  const OperationalOracle oracle(reduced_spaces());
  const SimpleState x0{"ideal_reduced", 1.0, 1.5, 1.0};
  const SimpleState x1{"ideal_reduced", 1.0, 3.0, 1.0};
  const SimpleState x{"ideal_reduced", 1.0, 2.0, 1.7};
  ReconstructOptions opts;
  opts.tol = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reconstruct_entropy(oracle, x0, x1, x, opts));
  }
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

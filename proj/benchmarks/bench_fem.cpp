#include <string>

#include <benchmark/benchmark.h>

#include "beamspec/fem_oracle.hpp"

namespace {

using namespace beamspec;

BeamSystem variable_system() {
  return load_system(std::string(BEAMSPEC_CONFIG_DIR) + "/variable_M1.json");
}

void BM_Assemble(benchmark::State& state) {
  const BeamSystem sys = variable_system();
  const int e = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(sys, e));
}
BENCHMARK(BM_Assemble)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMicrosecond);

void BM_SolveGeneralized(benchmark::State& state) {
  const DiscreteOperator op = assemble(variable_system(), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_generalized(op, 6));
}
BENCHMARK(BM_SolveGeneralized)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace

#include <string>

#include <benchmark/benchmark.h>

#include "beamspec/fundamental.hpp"
#include "beamspec/spectrum.hpp"

namespace {

using namespace beamspec;

BeamSystem variable_system() {
  return load_system(std::string(BEAMSPEC_CONFIG_DIR) + "/variable_M1.json");
}

void BM_CharDet(benchmark::State& state) {
  const BeamSystem sys = variable_system();
  const double s = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(char_det_at_s(sys, s));
}
BENCHMARK(BM_CharDet)->Arg(2)->Arg(8)->Arg(32);

void BM_Fundamental(benchmark::State& state) {
  const BeamSystem sys = variable_system();
  for (auto _ : state) benchmark::DoNotOptimize(left_fundamental(sys, 500.0, {1e-10, 65}));
}
BENCHMARK(BM_Fundamental);

void BM_Scan(benchmark::State& state) {
  const BeamSystem sys = variable_system();
  const int modes = static_cast<int>(state.range(0));
  const double s_max = scan_limit(sys, modes);
  for (auto _ : state) benchmark::DoNotOptimize(scan(sys, s_max));
}
BENCHMARK(BM_Scan)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_FindEigenvalues(benchmark::State& state) {
  const BeamSystem sys = variable_system();
  const int modes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(find_eigenvalues(sys, modes));
}
BENCHMARK(BM_FindEigenvalues)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Eigenpair(benchmark::State& state) {
  const BeamSystem sys = variable_system();
  const double lambda = find_eigenvalues(sys, 1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(eigenpair(sys, lambda, 1));
}
BENCHMARK(BM_Eigenpair)->Unit(benchmark::kMillisecond);

}  // namespace

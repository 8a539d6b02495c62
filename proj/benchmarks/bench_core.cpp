#include <cmath>

#include <benchmark/benchmark.h>

#include "becprobe/dynamics.hpp"
#include "becprobe/fock.hpp"
#include "becprobe/observables.hpp"
#include "becprobe/photodetection.hpp"

using namespace becprobe;

namespace {

FockVector coherent_atoms(double abs2) {
  const double a = std::sqrt(abs2);
  return coherent_fock_vector(a, default_cutoff(a));
}

void BM_EvolvePure(benchmark::State& state) {
  const auto c = coherent_atoms(static_cast<double>(state.range(0)));
  const auto p = ModelParams::from_ratio(1.0, 1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_pure(c, std::sqrt(3.0), p, 1.3));
}
BENCHMARK(BM_EvolvePure)->Arg(3)->Arg(30)->Arg(300);

void BM_AtomPhaseVariance(benchmark::State& state) {
  const auto rho = DensityMatrix::from_pure(coherent_atoms(3.0));
  const auto p = ModelParams::from_ratio(1.0, 1.0, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(phase_variance(reduce_to_atoms(evolve_density(rho, std::sqrt(3.0), p, 1.3))));
}
BENCHMARK(BM_AtomPhaseVariance);

void BM_Husimi(benchmark::State& state) {
  const auto rho = DensityMatrix::from_pure(coherent_atoms(3.0));
  const auto grid = GridSpec::centered(std::sqrt(3.0), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(husimi(rho, grid));
}
BENCHMARK(BM_Husimi)->Arg(101)->Arg(201);

void BM_UnconditionedState(benchmark::State& state) {
  const auto rho = DensityMatrix::from_pure(coherent_atoms(3.0));
  DetectionParams det;
  det.model = ModelParams::from_ratio(1.0, 1.0, 1.0);
  det.gamma = 2e-2;
  det.beta = std::sqrt(3.0);
  for (auto _ : state) benchmark::DoNotOptimize(unconditioned_state(rho, det, 2.0));
}
BENCHMARK(BM_UnconditionedState);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "corrsense/mc_oracle.hpp"
#include "corrsense/noise.hpp"
#include "corrsense/optimizer.hpp"
#include "corrsense/uncertainty.hpp"

using namespace corrsense;

namespace {

TemporalSpectrum kind_at(int i) { return {static_cast<SpectrumKind>(i), 1.0, 0.5}; }

void BM_Gamma(benchmark::State& state) {
  const TemporalSpectrum s = kind_at(static_cast<int>(state.range(0)));
  double tau = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma(s, tau));
    tau = tau < 10.0 ? tau * 1.01 : 0.1;
  }
}
BENCHMARK(BM_Gamma)->DenseRange(0, 3);

void BM_ShotCorrelationQuadrature(benchmark::State& state) {
  const TemporalSpectrum s = kind_at(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(shot_correlation_quadrature(s, 0.7, 3));
}
BENCHMARK(BM_ShotCorrelationQuadrature)->DenseRange(0, 3);

void BM_VarianceFull(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const NoiseKernel kernel(NoiseModel{kind_at(3), {SpectrumKind::Gaussian, 1.0, 1.0}}, n);
  const SpinMoments m = family_moments(n, SqueezingFamily::psi_kappa(0.3));
  const ProtocolParams p = ProtocolParams::make(n, 1e4, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(variance_full(m, kernel, p));
}
BENCHMARK(BM_VarianceFull)->Arg(100)->Arg(1000)->Arg(10000);

void BM_OptimizePsi(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const NoiseModel m{kind_at(1), {}};
  for (auto _ : state) benchmark::DoNotOptimize(optimize_protocol(m, FamilyKind::PsiKappa, n, 1e4));
}
BENCHMARK(BM_OptimizePsi)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SqueezedShot(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const NoiseModel m{kind_at(0), {}};
  const SqueezedRamsey sim(probe_state(n, SqueezingFamily::psi_kappa(0.5)));
  const PhaseMatrix phases = sample_phase_matrix(m, n, 64, 0.3, 1);
  CounterRng rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sim.run(phases, 0.0, rng));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_SqueezedShot)->Arg(4)->Arg(8)->Arg(12);

}  // namespace

BENCHMARK_MAIN();

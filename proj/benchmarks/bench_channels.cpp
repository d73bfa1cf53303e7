#include <benchmark/benchmark.h>

#include <cmath>

#include "kerrfilter/master_eq.hpp"
#include "kerrfilter/metrics.hpp"
#include "kerrfilter/mzi_channel.hpp"
#include "kerrfilter/states.hpp"

using namespace kerrfilter;

namespace {

mzi::MziParams even_comb() { return mzi::MziParams::from_tau_over_pi(CavityParams(1.0, 2.5e-3), 0.01, 200.0); }

DensityMatrix coherent_rho(int n_max) {
  return DensityMatrix::from_pure(states::coherent(std::sqrt(10.0), HilbertSpec(n_max, 0.5)));
}

void BM_KrausFromMzi(benchmark::State& state) {
  const HilbertSpec spec(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mzi::kraus_from_mzi(even_comb(), spec));
}
BENCHMARK(BM_KrausFromMzi)->Arg(20)->Arg(40)->Arg(60);

void BM_ApplyChannel(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const mzi::KrausSet kraus = mzi::kraus_from_mzi(even_comb(), HilbertSpec(n_max, 0.5));
  const DensityMatrix rho = coherent_rho(n_max);
  for (auto _ : state) benchmark::DoNotOptimize(mzi::apply_channel(rho, kraus));
}
BENCHMARK(BM_ApplyChannel)->Arg(20)->Arg(40)->Arg(60);

void BM_ApplyChannelDense(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const mzi::KrausSet kraus = mzi::kraus_from_mzi(even_comb(), HilbertSpec(n_max, 0.5));
  const DensityMatrix rho = coherent_rho(n_max);
  for (auto _ : state) benchmark::DoNotOptimize(mzi::apply_channel_dense(rho, kraus));
}
BENCHMARK(BM_ApplyChannelDense)->Arg(20)->Arg(40);

void BM_UpdateRuleStep(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const mzi::UpdateRule rule(even_comb(), HilbertSpec(n_max, 0.5));
  const DensityMatrix rho = coherent_rho(n_max);
  for (auto _ : state) benchmark::DoNotOptimize(rule.step(rho));
}
BENCHMARK(BM_UpdateRuleStep)->Arg(20)->Arg(40)->Arg(60);

void BM_MasterRhs(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const master::LossModel model(even_comb());
  const DensityMatrix rho = coherent_rho(n_max);
  for (auto _ : state) benchmark::DoNotOptimize(master::rhs_eq2(rho, model));
}
BENCHMARK(BM_MasterRhs)->Arg(20)->Arg(40);

void BM_MasterStep(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const HilbertSpec spec(n_max, 0.5);
  const master::MasterEqPropagator prop(master::LossModel(even_comb()), spec, 20);
  const DensityMatrix rho = coherent_rho(n_max);
  for (auto _ : state) benchmark::DoNotOptimize(prop.step(rho));
}
BENCHMARK(BM_MasterStep)->Arg(20)->Arg(40);

void BM_RotationOptimizedFidelity(benchmark::State& state) {
  const HilbertSpec spec(45);
  const DensityMatrix rho = DensityMatrix::from_pure(states::coherent(std::sqrt(15.0), spec));
  const StateVector target = states::cat(states::CatSpec(std::sqrt(15.0), 5), spec);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::fidelity_rotation_optimized(rho, target));
}
BENCHMARK(BM_RotationOptimizedFidelity);

void BM_WignerPoint(benchmark::State& state) {
  const DensityMatrix rho = coherent_rho(40);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::wigner_point(rho, cplx(0.5, -1.0)));
}
BENCHMARK(BM_WignerPoint);

}  // namespace

BENCHMARK_MAIN();

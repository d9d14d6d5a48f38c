#include <benchmark/benchmark.h>

#include "catsense/evolution.hpp"
#include "catsense/macroscopicity.hpp"
#include "catsense/metrology.hpp"
#include "catsense/states.hpp"

namespace {

using namespace catsense;

void BM_DephaseDiagonal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AdditiveObservable a = AdditiveObservable::mz(n);
  const DensityMatrix rho = DensityMatrix::from_pure(staircase(n));
  for (auto _ : state) {
    DensityMatrix out = dephase(rho, a, 0.7, 0.1);
    benchmark::DoNotOptimize(out.matrix().data());
  }
}
BENCHMARK(BM_DephaseDiagonal)->Arg(6)->Arg(8)->Arg(10);

void BM_DephaseRotated(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AdditiveObservable a = AdditiveObservable::mx(n);
  const DensityMatrix rho = thermal_x(n, 0.5);
  for (auto _ : state) {
    DensityMatrix out = dephase(rho, a, 0.7, 0.1);
    benchmark::DoNotOptimize(out.matrix().data());
  }
}
BENCHMARK(BM_DephaseRotated)->Arg(6)->Arg(8);

void BM_RamseyResponseBuild(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AdditiveObservable a = AdditiveObservable::mz(n);
  const DensityMatrix rho = DensityMatrix::from_pure(product_plus(n));
  const Projector eta = positive_half_projector(AdditiveObservable::my(n));
  for (auto _ : state) {
    RamseyResponse response(rho, a, eta);
    benchmark::DoNotOptimize(response.trace_double_commutator());
  }
}
BENCHMARK(BM_RamseyResponseBuild)->Arg(6)->Arg(8)->Arg(10);

void BM_WorkingPointScan(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AdditiveObservable a = AdditiveObservable::mz(n);
  const DensityMatrix rho = DensityMatrix::from_pure(ghz(n));
  Matrix v(rho.dim(), 1);
  v.col(0) = ghz(n).amplitudes();
  const Projector eta = Projector::from_span(v);
  const RamseyResponse response(rho, a, eta);
  for (auto _ : state) {
    auto wp = response.best_working_point(0.7, 0.05);
    benchmark::DoNotOptimize(wp.delta_sqrtT);
  }
}
BENCHMARK(BM_WorkingPointScan)->Arg(8)->Arg(10);

void BM_DoubleCommutatorSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AdditiveObservable a = AdditiveObservable::mz(n);
  const DensityMatrix rho = rho_ex(n);
  for (auto _ : state) {
    EighResult res = double_commutator_spectrum(rho, a);
    benchmark::DoNotOptimize(res.eigenvalues.data());
  }
}
BENCHMARK(BM_DoubleCommutatorSpectrum)->Arg(4)->Arg(6)->Arg(8);

}  // namespace

BENCHMARK_MAIN();

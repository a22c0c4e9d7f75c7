#include <benchmark/benchmark.h>

#include <cmath>

#include "gapflow/abelian.hpp"
#include "gapflow/potential.hpp"
#include "gapflow/quadrature.hpp"
#include "gapflow/reconstruct.hpp"
#include "gapflow/scatter.hpp"

using namespace gapflow;

namespace {

SteplikeOperator steplike() {
  return SteplikeOperator({0.5, 0.0}, {0.5, 3.0}, {{-1, std::nullopt, 0.1}, {0, std::nullopt, 2.9}});
}

}  // namespace

static void BM_EndpointSingular(benchmark::State& state) {
  const RealIntegrand f = [](double x) -> cplx { return std::log(1.0 + x) / std::sqrt(1.0 - x * x); };
  for (auto _ : state) benchmark::DoNotOptimize(integrate_endpoint_singular(f, {-1.0, 1.0}, {true, true}));
}
BENCHMARK(BM_EndpointSingular);

static void BM_Periods(benchmark::State& state) {
  const HyperellipticSurface s({-3.0, -2.0, -1.0, 0.5, 1.5, 3.0});
  for (auto _ : state) benchmark::DoNotOptimize(compute_periods(s));
}
BENCHMARK(BM_Periods);

static void BM_Blaschke(benchmark::State& state) {
  const BlaschkeEvaluator b(HyperellipticSurface({-2.0, -1.0, 1.0, 2.0}), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(b(SurfacePoint::upper(cplx(0.3, 0.4))));
}
BENCHMARK(BM_Blaschke);

static void BM_ScatteringData(benchmark::State& state) {
  ScatteringGrids g;
  g.samples_per_band = static_cast<int>(state.range(0));
  const SteplikeOperator op = steplike();
  for (auto _ : state) benchmark::DoNotOptimize(scattering_data(op, g));
}
BENCHMARK(BM_ScatteringData)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_ProblemSetup(benchmark::State& state) {
  const ScatteringData d = scattering_data(steplike());
  for (auto _ : state) benchmark::DoNotOptimize(ReconstructionProblem(d));
}
BENCHMARK(BM_ProblemSetup)->Unit(benchmark::kMillisecond);

static void BM_ReconstructPoint(benchmark::State& state) {
  const ReconstructionProblem pb(scattering_data(steplike()));
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_T(pb, 1.5));
}
BENCHMARK(BM_ReconstructPoint)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

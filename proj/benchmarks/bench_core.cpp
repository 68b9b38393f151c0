#include <benchmark/benchmark.h>

#include "isotropy/bernoulli.hpp"
#include "isotropy/geometry.hpp"
#include "isotropy/samplers.hpp"
#include "isotropy/symlin.hpp"

using namespace isotropy;

static void BM_Eigen(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(1);
  SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a.set(i, j, rng.normal());
  for (auto _ : state) benchmark::DoNotOptimize(eigen(a));
}
BENCHMARK(BM_Eigen)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_RankOneAccumulate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(2);
  Vector y(n);
  for (double& v : y) v = rng.normal();
  RankOneAccumulator acc(n);
  for (auto _ : state) acc.add(y);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RankOneAccumulate)->Arg(8)->Arg(64);

static void BM_SampleDirect(benchmark::State& state) {
  const auto family = static_cast<BodyFamily>(state.range(0));
  const Body body = isotropic_normalization(family, 16);
  RandomStream rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_direct(body, rng));
  state.SetLabel(to_string(family));
}
BENCHMARK(BM_SampleDirect)
    ->Arg(static_cast<int>(BodyFamily::Cube))
    ->Arg(static_cast<int>(BodyFamily::Ball))
    ->Arg(static_cast<int>(BodyFamily::Simplex));

static void BM_HitAndRunStep(benchmark::State& state) {
  Sampler s = hit_and_run_sampler(isotropic_normalization(BodyFamily::Simplex, 16));
  RandomStream rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(s.draw(rng));
}
BENCHMARK(BM_HitAndRunStep);

static void BM_RademacherExact(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  RandomStream rng(5);
  std::vector<Vector> pts(m, Vector(4));
  for (auto& p : pts)
    for (double& v : p) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(rademacher_exact(pts));
}
BENCHMARK(BM_RademacherExact)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

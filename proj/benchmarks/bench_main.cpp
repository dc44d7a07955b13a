#include <benchmark/benchmark.h>

#include <cmath>

#include "rds/benchmark.hpp"
#include "rds/euclidean_pss.hpp"
#include "rds/random.hpp"
#include "rds/solver.hpp"
#include "rds/sphere_analysis.hpp"
#include "rds/tangent_pss.hpp"

namespace {

using namespace rds;

void BM_CosineMeasureExact(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto generator = static_cast<PssGenerator>(state.range(1));
  const EuclideanPss pss = make_pss(generator, random_rotation(m, 1));
  for (auto _ : state) benchmark::DoNotOptimize(cosine_measure_exact(pss).cosine_measure);
}
BENCHMARK(BM_CosineMeasureExact)->ArgsProduct({{2, 4, 6, 8}, {0, 1, 2}});

void BM_SphereCmExact(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(derive_seed({2, static_cast<std::uint64_t>(n)}));
  const Vector x = random_unit_vector(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(cm_projected_plusminus_exact(x).cm);
}
BENCHMARK(BM_SphereCmExact)->Arg(4)->Arg(8)->Arg(16)->Arg(24)->Arg(32);

void BM_PollingSet(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto style = static_cast<PollingStyle>(state.range(1));
  const ManifoldPoint x = random_point(Manifold::embedded_sphere(m, m + 33), 3);
  PollingStrategy strategy;
  strategy.style = style;
  strategy.rotate = true;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(make_polling_set(strategy, x, ++seed).directions.data());
}
BENCHMARK(BM_PollingSet)->ArgsProduct({{2, 8, 32}, {0, 1}});

void BM_DirectSearch(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const BenchmarkInstance inst = generate_instance({ProblemFamily::RayleighSphere, m, m + 8, 4});
  SolverConfig cfg;
  cfg.budget = 100L * (m + 1);
  cfg.polling.rotate = true;
  for (auto _ : state) benchmark::DoNotOptimize(direct_search(inst.problem, cfg).final_f);
}
BENCHMARK(BM_DirectSearch)->Arg(2)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "distort/copula.hpp"
#include "distort/distortion.hpp"
#include "distort/distribution.hpp"
#include "distort/joint.hpp"
#include "distort/measures.hpp"

namespace {

using namespace distort;

Distribution dense_discrete(std::size_t n) {
  std::mt19937_64 rng(42u);
  std::uniform_real_distribution<double> sev(0.0, 1000.0);
  std::uniform_real_distribution<double> wt(0.1, 1.0);
  std::vector<double> xs(n), ps(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = sev(rng);
    ps[i] = wt(rng);
    total += ps[i];
  }
  for (auto& p : ps) p /= total;
  return Distribution::discrete(std::move(xs), std::move(ps));
}

void BM_ChoquetDiscrete(benchmark::State& state) {
  Distribution d = dense_discrete(static_cast<std::size_t>(state.range(0)));
  DistortionFn g = glue_distortion(0.3, 0.5, 0.9, 0.95);
  for (auto _ : state) {
    benchmark::DoNotOptimize(choquet(g, d).value);
  }
}
BENCHMARK(BM_ChoquetDiscrete)->Arg(100)->Arg(1000)->Arg(10000);

void BM_ChoquetParametric(benchmark::State& state) {
  Distribution d = Distribution::pareto(3.0, 1.0);
  DistortionFn g = wang_distortion(0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(choquet(g, d).value);
  }
}
BENCHMARK(BM_ChoquetParametric);

void BM_QuantileFormDiscrete(benchmark::State& state) {
  Distribution d = dense_discrete(static_cast<std::size_t>(state.range(0)));
  DistortionFn g = dual_power_distortion(2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(choquet_quantile_form(g, d).value);
  }
}
BENCHMARK(BM_QuantileFormDiscrete)->Arg(1000);

void BM_CopulaSample(benchmark::State& state) {
  Copula c = Copula::clayton(2.0);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(c.sample_pairs(n, 7u));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_CopulaSample)->Arg(1024)->Arg(16384);

void BM_DerivedClassify(benchmark::State& state) {
  DistortionFn g = derived_distortion(Copula::frank(2.0), 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_shape(g, 2000).concave_ok);
  }
}
BENCHMARK(BM_DerivedClassify);

void BM_McSumQuantile(benchmark::State& state) {
  JointModel j = JointModel::copula_coupled(Distribution::pareto(3.0, 1.0),
                                            Distribution::pareto(3.0, 1.0),
                                            Copula::clayton(2.0));
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Distribution s = j.sum_distribution_mc(n, 11u);
    benchmark::DoNotOptimize(s.quantile_lower(0.99));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_McSumQuantile)->Arg(65536);

void BM_TailSubadditivity(benchmark::State& state) {
  JointModel j = JointModel::independent(
      {dense_discrete(50), dense_discrete(50)});
  DistortionFn g = glue_distortion(0.3, 0.5, 0.9, 0.95);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tail_subadditivity_check(g, j, 0.9).verdict);
  }
}
BENCHMARK(BM_TailSubadditivity);

}  // namespace

BENCHMARK_MAIN();

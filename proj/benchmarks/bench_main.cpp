#include <benchmark/benchmark.h>

#include "metalab/capacity.hpp"
#include "metalab/learner.hpp"
#include "metalab/reference.hpp"
#include "metalab/validate.hpp"

namespace {

metalab::Environment bench_env(std::size_t dim) {
  metalab::Rng rng(7);
  metalab::RelevantCoordinateSpec spec;
  spec.input_dim = dim;
  spec.label_noise = 0.25;
  return metalab::relevant_coordinate_environment(spec, rng);
}

void BM_InnerMinimize(benchmark::State& state) {
  const auto env = bench_env(3);
  const auto family = metalab::relevant_coordinate_family(3);
  metalab::Rng rng(1);
  const auto sample = metalab::sample_m(env.task(0), static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(metalab::inner_minimize(family.rep(0), family, sample));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          static_cast<std::int64_t>(family.heads().size()));
}
BENCHMARK(BM_InnerMinimize)->Arg(8)->Arg(64)->Arg(512);

void BM_MetaTrain(benchmark::State& state) {
  const auto env = bench_env(3);
  const auto family = metalab::relevant_coordinate_family(3);
  const metalab::RepresentationLearner learner(family);
  metalab::Rng rng(2);
  const auto meta = metalab::sample_meta(env, static_cast<std::size_t>(state.range(0)), 32,
                                         metalab::EnvironmentDrawn{}, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(learner.meta_train(meta));
  }
}
BENCHMARK(BM_MetaTrain)->Arg(4)->Arg(64);

void BM_GreedyCover(benchmark::State& state) {
  const auto env = bench_env(3);
  const auto family = metalab::relevant_coordinate_family(3);
  const auto probes = metalab::head_probes(family, env, {});
  const auto space = metalab::head_metric_space(family, probes.back());
  for (auto _ : state) {
    benchmark::DoNotOptimize(metalab::epsilon_cover(space, 0.05, metalab::CoverMode::Greedy));
  }
}
BENCHMARK(BM_GreedyCover);

void BM_ExactCover(benchmark::State& state) {
  metalab::Rng rng(3);
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<double>> pts(k, std::vector<double>(2));
  for (auto& p : pts) p = {rng.uniform01(), rng.uniform01()};
  std::vector<double> d(k * k);
  std::vector<std::size_t> ids(k);
  for (std::size_t i = 0; i < k; ++i) {
    ids[i] = i;
    for (std::size_t j = 0; j < k; ++j) {
      d[i * k + j] = std::abs(pts[i][0] - pts[j][0]) + std::abs(pts[i][1] - pts[j][1]);
    }
  }
  const metalab::FinitePseudoMetricSpace space(ids, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(metalab::epsilon_cover(space, 0.2, metalab::CoverMode::Exact));
  }
}
BENCHMARK(BM_ExactCover)->Arg(8)->Arg(12);

void BM_GuaranteeTrial(benchmark::State& state) {
  metalab::GuaranteeConfig cfg;
  cfg.env = std::make_shared<const metalab::Environment>(bench_env(2));
  cfg.family = std::make_shared<const metalab::HypothesisFamily>(metalab::relevant_coordinate_family(2));
  cfg.n = static_cast<std::size_t>(state.range(0));
  cfg.m = static_cast<std::size_t>(state.range(1));
  std::size_t t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(metalab::guarantee_trial(cfg, t++));
  }
}
BENCHMARK(BM_GuaranteeTrial)->Args({16, 16})->Args({256, 128});

}  // namespace
BENCHMARK_MAIN();

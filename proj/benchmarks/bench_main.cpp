#include <benchmark/benchmark.h>

#include "schurlab/schurlab.hpp"

using namespace schurlab;

namespace {

SparseFunction box_function(const Group& g, int radius) {
  return normalized_indicator(g, *g.ball_at_identity(radius), 2.0);
}

void BM_FreeGroupBall(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  for (auto _ : state) {
    // A fresh group each time so the ball cache does not hide the work.
    const Group g = Group::free(2);
    benchmark::DoNotOptimize(g.ball_at_identity(r)->size());
  }
}
BENCHMARK(BM_FreeGroupBall)->Arg(4)->Arg(6)->Arg(8);

void BM_PhiKernel(benchmark::State& state) {
  const Group g = Group::zd(2);
  const auto f = box_function(g, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(phi_kernel(f).support_size());
  state.SetComplexityN(static_cast<long>(f.support_size()));
}
BENCHMARK(BM_PhiKernel)->Arg(2)->Arg(4)->Arg(8)->Complexity();

void BM_OpNorm(benchmark::State& state) {
  const Group g = Group::zd(1);
  const auto window = Window::ball(g, static_cast<int>(state.range(0)));
  const auto t = random_operator(window, 1);
  for (auto _ : state) benchmark::DoNotOptimize(op_norm(t).value);
}
BENCHMARK(BM_OpNorm)->Arg(8)->Arg(32)->Arg(128)->Arg(300);

void BM_GramPsd(benchmark::State& state) {
  const Group g = Group::free(2);
  const auto k = phi_kernel(box_function(g, 2));
  const auto set = *g.ball_at_identity(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gram_psd_check(k, set).min_eigenvalue);
}
BENCHMARK(BM_GramPsd)->Arg(2)->Arg(3);

void BM_BernoulliCluster(benchmark::State& state) {
  const Group g = state.range(0) == 1 ? Group::zd(2) : Group::free(2);
  const auto m = PercModel::bernoulli(g, 0.3);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_cluster(m, ++seed).vertices.size());
}
BENCHMARK(BM_BernoulliCluster)->Arg(1)->Arg(2);

void BM_TilingEstimate(benchmark::State& state) {
  const Group g = Group::zd(1);
  const auto m = PercModel::tiling(g, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi_perc_estimate(m, 1.5, g.coords({1}), 10'000, 3).mean);
  }
}
BENCHMARK(BM_TilingEstimate);

}  // namespace
BENCHMARK_MAIN();

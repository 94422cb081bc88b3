#include <benchmark/benchmark.h>

#include <vector>

#include "eqlab/couplings.hpp"
#include "eqlab/divergence.hpp"
#include "eqlab/experiments.hpp"
#include "eqlab/harness.hpp"
#include "eqlab/wavelet.hpp"

namespace {

using namespace eqlab;

void BM_HaarRoundTrip(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RngStream rng(7, 0);
  std::vector<double> y(n);
  for (auto& v : y) v = rng.normal();
  for (auto _ : state) {
    auto l = haar_analyze(y, 0);
    benchmark::DoNotOptimize(haar_synthesize(l));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_HaarRoundTrip)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

void BM_PbarToQ(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const ModelSpec spec = make_model_spec("zero", "constant", k, 4, 0);
  RngStream rng(11, 0);
  const auto draw = sample_sequence(spec, false, rng);
  const DrawShape shape = shape_of(spec);
  for (auto _ : state) benchmark::DoNotOptimize(pbar_to_q(draw, shape, rng));
}
BENCHMARK(BM_PbarToQ)->DenseRange(10, 16, 3);

void BM_PtildeToPcheck(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const ModelSpec spec = make_model_spec("sine", "linear", k, k / 2 + 1, k / 4);
  RngStream rng(13, 0);
  const auto draw = sample_sequence(spec, true, rng);
  const DrawShape shape = shape_of(spec);
  for (auto _ : state) benchmark::DoNotOptimize(ptilde_to_pcheck(draw, shape, rng));
}
BENCHMARK(BM_PtildeToPcheck)->DenseRange(10, 16, 3);

void BM_GammaPoissonMixture(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kl_gamma_vs_poisson_mixture({a, 1.0 / a}, {0.9 * a, 1.0 / (0.9 * a)}, 2.0));
  }
}
BENCHMARK(BM_GammaPoissonMixture)->Arg(50)->Arg(500)->Arg(5000);

void BM_GammaSumConvolution(benchmark::State& state) {
  const GammaSumSpec gs{{0.5, 0.5}, {0.05, -0.05}, 1000.0};
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kl_gamma_sum(gs, grid));
}
BENCHMARK(BM_GammaSumConvolution)->Arg(1 << 12)->Arg(1 << 16);

void BM_DecomposePipeline(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const ModelSpec spec = make_model_spec("sine", "quadratic", k, k / 2 + 1, k / 4);
  for (auto _ : state) benchmark::DoNotOptimize(decompose_pipeline7(spec));
}
BENCHMARK(BM_DecomposePipeline)->DenseRange(10, 16, 3);

}  // namespace
BENCHMARK_MAIN();

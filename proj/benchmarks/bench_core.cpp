#include <benchmark/benchmark.h>

#include "measure_pca/embeddings.hpp"
#include "measure_pca/experiments.hpp"
#include "measure_pca/hilbert.hpp"
#include "measure_pca/ot.hpp"

using namespace measure_pca;

namespace {

DiscreteMeasure cloud(std::size_t m, std::uint64_t stream) {
  RngStream rng(1, stream);
  return make_gaussian_reference(m, 2, 1.0, rng);
}

void BM_SolveOt(benchmark::State& state) {
  const auto a = cloud(static_cast<std::size_t>(state.range(0)), 1);
  const auto b = cloud(static_cast<std::size_t>(state.range(1)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(solve_discrete_ot(a, b));
}
BENCHMARK(BM_SolveOt)->Args({50, 50})->Args({200, 200})->Args({100, 1000})->Unit(benchmark::kMillisecond);

void BM_EmbedSw(benchmark::State& state) {
  RngStream rng(2, 1);
  const auto cfg = EmbeddingConfig::sw(make_sphere_directions(20, 2, rng), make_quantile_grid(20));
  const auto mu = cloud(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(embed(mu, cfg));
}
BENCHMARK(BM_EmbedSw)->Arg(1000)->Arg(10000);

void BM_SpectralDecompose(benchmark::State& state) {
  const auto n = state.range(0);
  RngStream rng(3, 1);
  const Eigen::MatrixXd f = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return rng.normal(); });
  const CovOperator sigma(f * f.transpose() / static_cast<double>(n));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(sigma));
}
BENCHMARK(BM_SpectralDecompose)->Arg(50)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_ProcrustesDisparity(benchmark::State& state) {
  RngStream rng(4, 1);
  const Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(200, 2, [&] { return rng.normal(); });
  const Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(200, 2, [&] { return rng.normal(); });
  for (auto _ : state) benchmark::DoNotOptimize(procrustes_disparity(a, b));
}
BENCHMARK(BM_ProcrustesDisparity);

}  // namespace
BENCHMARK_MAIN();

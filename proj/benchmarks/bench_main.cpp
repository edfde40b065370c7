#include <benchmark/benchmark.h>

#include <random>

#include "bsf/forest_linalg.hpp"
#include "bsf/oracle_lab.hpp"
#include "bsf/posterior.hpp"
#include "bsf/sampler.hpp"

using namespace bsf;

namespace {

WeightMatrix random_weights(int n) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(-5, 0);
  Eigen::MatrixXd lw = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) lw(i, j) = lw(j, i) = u(rng);
  return WeightMatrix(lw);
}

BsfModel pair_model(int n) {
  const auto s = generate_gaussian(GaussianOracleSpec::symmetric_pair(4.0, 2), n, 7);
  BsfConfig cfg;
  cfg.log_lambda = -3.0;
  return BsfModel(s.data, cfg);
}

}  // namespace

static void BM_LogDetElimination(benchmark::State& state) {
  const auto l = build_laplacian(random_weights(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(log_det_L_plus_J(l));
}
BENCHMARK(BM_LogDetElimination)->Arg(8)->Arg(32)->Arg(128)->Arg(512);

static void BM_LogDetCholesky(benchmark::State& state) {
  const auto l = build_laplacian(random_weights(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(log_det_L_plus_J_dense(l));
}
BENCHMARK(BM_LogDetCholesky)->Arg(8)->Arg(32)->Arg(128)->Arg(512);

static void BM_ExactPosterior(benchmark::State& state) {
  const auto model = pair_model(static_cast<int>(state.range(0)));
  PosteriorOptions o;
  o.retain_entries = false;
  for (auto _ : state) benchmark::DoNotOptimize(exact_posterior(model, o).log_normalizer);
}
BENCHMARK(BM_ExactPosterior)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_GibbsSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto model = pair_model(n);
  ChainState chain(model, Partition::one_block(n), 3);
  for (auto _ : state) {
    gibbs_sweep(chain, model);
    split_merge_move(chain, model);
  }
}
BENCHMARK(BM_GibbsSweep)->Arg(20)->Arg(60)->Arg(200);
BENCHMARK_MAIN();

// Micro-benchmarks of the hot paths: norms, simulation, sampling, bound assembly.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "pacrnn/bound.hpp"
#include "pacrnn/certify.hpp"
#include "pacrnn/dynsys.hpp"
#include "pacrnn/experiment.hpp"
#include "pacrnn/mcmc.hpp"
#include "pacrnn/numerics.hpp"

namespace {

using namespace pacrnn;

Matrix random_square(SeededRng& rng, std::size_t n) {
  Matrix m(n, n);
  for (double& x : m.data()) x = rng.normal();
  return m;
}

void BM_SpectralNorm(benchmark::State& state) {
  SeededRng rng(1);
  const Matrix m = random_square(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_norm(m));
}
BENCHMARK(BM_SpectralNorm)->Arg(2)->Arg(8)->Arg(32);

void BM_GenerateDataset(benchmark::State& state) {
  const RnnSystem gen = build_paper_generator();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_dataset(gen, 7, n, 1.0, 1.27));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateDataset)->Arg(100)->Arg(1000);

void BM_CertifySample(benchmark::State& state) {
  SeededRng rng(2);
  Vector theta(PredictorShape::dim);
  for (double& x : theta) x = 0.1 * rng.normal();
  const RnnSystem gen = build_paper_generator();
  const auto data = effective_data_constants(gen, rnn_constants(gen), 1.27);
  const LossSpec loss;
  for (auto _ : state) benchmark::DoNotOptimize(certify_sample(theta, loss, data));
}
BENCHMARK(BM_CertifySample);

void BM_MetropolisHastings(benchmark::State& state) {
  const auto prior = truncated_prior(0.02, 0.999);
  ChainConfig cfg;
  cfg.steps = 10000;
  const Vector init(PredictorShape::dim, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(mh_sample(prior, init, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.steps));
}
BENCHMARK(BM_MetropolisHastings);

void BM_AssembleBound(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.n_grid = {1000};
  cfg.n_f = static_cast<std::size_t>(state.range(0));
  const auto run = run_seed(cfg, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_bound(run.records, 1000, std::sqrt(1000.0), cfg.delta, 0));
}
BENCHMARK(BM_AssembleBound)->Arg(1000)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();

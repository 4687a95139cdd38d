#include <benchmark/benchmark.h>

#include <vector>

#include "gpsup/covmodel.hpp"
#include "gpsup/gauss_sim.hpp"
#include "gpsup/horizon.hpp"
#include "gpsup/mc_engine.hpp"
#include "gpsup/pickands.hpp"
#include "gpsup/random.hpp"

namespace {

void BM_NormalQuantile(benchmark::State& state) {
  gpsup::RandomStream stream(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(stream.normal());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NormalQuantile);

// Two OU paths per FFT of the given circulant size.
void BM_CirculantPair(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = gpsup::CovarianceModel::stable_exp(1.0, 1.0);
  gpsup::CirculantEmbedding emb(gpsup::model_lag_covariance(model, 0.01), n, "bench");
  gpsup::SimWorkspace work;
  std::vector<double> a(n), b(n);
  gpsup::RandomStream stream(2, 0);
  for (auto _ : state) {
    emb.sample(stream, a, b, work);
    benchmark::DoNotOptimize(a.data());
  }
  state.SetItemsProcessed(2 * state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_CirculantPair)->RangeMultiplier(8)->Range(1 << 9, 1 << 18)->Unit(benchmark::kMicrosecond);

void BM_PickandsCell(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(gpsup::estimate_h_of_s(1.0, 4.0, 0.01, 2000, gpsup::RunOptions{3, 1}));
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_PickandsCell)->Unit(benchmark::kMillisecond);

void BM_SupTailExponential(benchmark::State& state) {
  const auto ou = gpsup::CovarianceModel::stable_exp(1.0, 1.0);
  const auto horizon = gpsup::HorizonDistribution::exponential(1.0);
  gpsup::McOptions options;
  options.run = gpsup::RunOptions{4, 1};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        gpsup::estimate_sup_tail(ou, horizon, 3.0, 2000, gpsup::GridPolicy{}, options));
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_SupTailExponential)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "ntklab/dataset.hpp"
#include "ntklab/eigen.hpp"
#include "ntklab/kernel.hpp"
#include "ntklab/margin.hpp"
#include "ntklab/network.hpp"
#include "ntklab/train.hpp"
#include "ntklab/vbar.hpp"

namespace {

ntk::NetParams init(std::size_t m, std::size_t d) {
  return ntk::coupled_init({m, d, 1.0, 7, ntk::ScaleMode::inv_sqrt_m});
}

void BM_ForwardAll(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto ds = ntk::gen_random_sphere(64, 16, ntk::LabelMode::random_signs, 3);
  const auto p = init(m, ds.d());
  for (auto _ : state) benchmark::DoNotOptimize(ntk::forward_all(p, ds));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m * ds.n()));
}
BENCHMARK(BM_ForwardAll)->RangeMultiplier(4)->Range(64, 16384);

void BM_GradLogistic(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto ds = ntk::gen_random_sphere(64, 16, ntk::LabelMode::random_signs, 3);
  const auto p = init(m, ds.d());
  for (auto _ : state) benchmark::DoNotOptimize(ntk::grad_logistic(p, ds));
}
BENCHMARK(BM_GradLogistic)->RangeMultiplier(4)->Range(64, 16384);

void BM_HDis(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ds = ntk::gen_random_sphere(n, 8, ntk::LabelMode::random_signs, 3);
  const auto p = init(4096, ds.d());
  for (auto _ : state) benchmark::DoNotOptimize(ntk::h_dis(ds, p.weights));
}
BENCHMARK(BM_HDis)->RangeMultiplier(2)->Range(8, 64);

void BM_HCts(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ds = ntk::gen_random_sphere(n, 8, ntk::LabelMode::random_signs, 3);
  for (auto _ : state) benchmark::DoNotOptimize(ntk::h_cts(ds));
}
BENCHMARK(BM_HCts)->RangeMultiplier(4)->Range(16, 256);

void BM_JacobiSmallestEigenvalue(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = ntk::h_cts(ntk::gen_random_sphere(n, 8, ntk::LabelMode::random_signs, 3));
  for (auto _ : state) benchmark::DoNotOptimize(ntk::smallest_eigenvalue(k.entries));
}
BENCHMARK(BM_JacobiSmallestEigenvalue)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMillisecond);

void BM_MarginMc(benchmark::State& state) {
  const auto ds = ntk::gen_alternating_circle(16);
  const auto map = ntk::make_circle_rz(16);
  const auto samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ntk::margin_mc(ds, map, samples, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MarginMc)->Arg(1 << 14)->Arg(1 << 17)->Unit(benchmark::kMillisecond);

// Fixed-step logistic runs; T steps per iteration.
void BM_LogisticSteps(benchmark::State& state) {
  const auto ds = ntk::gen_alternating_circle(8);
  ntk::TrainConfig cfg = ntk::derive_logistic_schedule(8, ntk::margin_circle_exact(8), 0.2, 0.1);
  cfg.engine = state.range(0) ? ntk::TrainEngine::grouped : ntk::TrainEngine::direct;
  cfg.T = 200;
  cfg.record_every = cfg.T;
  for (auto _ : state) benchmark::DoNotOptimize(ntk::train_logistic(ds, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.T));
  state.SetLabel(ntk::to_string(cfg.engine));
}
BENCHMARK(BM_LogisticSteps)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SquaredSteps(benchmark::State& state) {
  const auto ds = ntk::gen_random_sphere(8, 6, ntk::LabelMode::random_signs, 3);
  auto k = ntk::h_cts(ds);
  ntk::TrainConfig cfg = ntk::derive_squared_schedule(8, ntk::min_eig(k), 1e-3, 8.0, std::size_t{4096});
  cfg.engine = state.range(0) ? ntk::TrainEngine::grouped : ntk::TrainEngine::direct;
  cfg.T = 200;
  cfg.record_every = cfg.T;
  for (auto _ : state) benchmark::DoNotOptimize(ntk::train_squared(ds, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.T));
  state.SetLabel(ntk::to_string(cfg.engine));
}
BENCHMARK(BM_SquaredSteps)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

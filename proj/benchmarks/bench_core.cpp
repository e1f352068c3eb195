// Microbenchmarks for the hot paths: forward/backward passes, optimizer
// steps, scoring, and the dataset generator.

#include <benchmark/benchmark.h>

#include <abc/adam.hpp>
#include <abc/autoencoder.hpp>
#include <abc/data.hpp>
#include <abc/eval.hpp>
#include <abc/models.hpp>
#include <abc/rng.hpp>

#include <utility>
#include <vector>

namespace {

std::vector<abc::LabeledPoint> make_batch(std::size_t n, std::uint64_t seed) {
  abc::Rng rng(seed);
  std::vector<abc::LabeledPoint> batch(n);
  for (std::size_t i = 0; i < n; ++i) {
    batch[i].x = {rng.normal(), rng.normal()};
    batch[i].y = static_cast<int>(rng.below(2));
  }
  return batch;
}

void BM_Reconstruct(benchmark::State& state) {
  const abc::AutoencoderParams ae = abc::make_autoencoder(2, {10, 10}, 1, 1);
  abc::Rng rng(2);
  const std::vector<double> x{rng.normal(), rng.normal()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(abc::reconstruct(ae, x));
  }
}
BENCHMARK(BM_Reconstruct);

void BM_BatchLossAndGrads(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const abc::ModelParams model = abc::init_model(abc::ModelKind::AbcAe, 2, {10, 10}, 1, 1);
  const std::vector<abc::LabeledPoint> batch = make_batch(n, 3);
  for (auto _ : state) {
    abc::Rng noise(0);
    benchmark::DoNotOptimize(abc::model_loss_and_grads(model, batch, noise));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BatchLossAndGrads)->Arg(1)->Arg(100);

void BM_AdamStep(benchmark::State& state) {
  abc::ModelParams model = abc::init_model(abc::ModelKind::AbcAe, 2, {10, 10}, 1, 1);
  const std::vector<abc::LabeledPoint> batch = make_batch(100, 3);
  abc::Rng noise(0);
  const abc::ModelGrads grads = abc::model_loss_and_grads(model, batch, noise).second;
  const std::vector<abc::NetworkParams*> nets = model.networks();
  abc::AdamState adam = abc::init_adam(std::as_const(model).networks(), abc::AdamConfig{});
  std::vector<const abc::NetworkGrads*> grad_ptrs;
  for (const abc::NetworkGrads& g : grads.nets) grad_ptrs.push_back(&g);
  for (auto _ : state) {
    abc::adam_step(adam, nets, grad_ptrs);
  }
}
BENCHMARK(BM_AdamStep);

void BM_AnomalyScore(benchmark::State& state) {
  const abc::ModelParams model = abc::init_model(abc::ModelKind::AbcAe, 2, {10, 10}, 1, 1);
  abc::Rng rng(4);
  const std::vector<double> x{rng.normal(), rng.normal()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(abc::anomaly_score(model, x));
  }
}
BENCHMARK(BM_AnomalyScore);

void BM_Auroc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  abc::Rng rng(5);
  abc::ScoredSet s;
  for (std::size_t i = 0; i < n; ++i)
    s.add(rng.below(64) == 0 ? 0.5 : rng.uniform(), rng.below(2) == 1);
  s.is_anomaly[0] = 0;
  s.is_anomaly[1] = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(abc::auroc(s));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Auroc)->Arg(1000)->Arg(100000);

void BM_GenToy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(abc::gen_toy(n, n, n / 2, 0.1, 1));
  }
}
BENCHMARK(BM_GenToy)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "dek/dek_model.hpp"
#include "dek/kpca.hpp"
#include "dek/pairing.hpp"
#include "dek/synthetic.hpp"
#include "dek/types.hpp"

namespace {

dek::DekModel bench_model(int dim, int width_factor) {
  dek::DekArchitecture arch;
  arch.input_dim = dim;
  arch.width_factor = width_factor;
  return dek::make_dek_model(arch, 7);
}

void BM_PairForward(benchmark::State& state) {
  const auto data = dek::make_waveform(2, 3);
  const auto model = bench_model(data.dim(), static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(dek::similarity(model, dek::row_span(data.features, 0), dek::row_span(data.features, 1)));
}
BENCHMARK(BM_PairForward)->Arg(1)->Arg(4);

void BM_PairForwardBackward(benchmark::State& state) {
  const auto data = dek::make_waveform(2, 3);
  const auto model = bench_model(data.dim(), static_cast<int>(state.range(0)));
  auto acc = dek::DekGrads::zeros_like(model);
  dek::DekBackwardWorkspace ws;
  for (auto _ : state) {
    const auto e = dek::dek_forward(model, dek::row_span(data.features, 0), dek::row_span(data.features, 1));
    dek::dek_backward_accumulate(model, e.trace, 0.5, acc, ws);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_PairForwardBackward)->Arg(1)->Arg(4);

// One mini-batch step: forward/backward over a batch of full pairs, then the update.
void BM_TrainStep(benchmark::State& state) {
  const auto data = dek::make_waveform(256, 5);
  auto model = bench_model(data.dim(), 1);
  const auto pairs = dek::make_pairs_full(data.labels);
  const std::size_t batch = static_cast<std::size_t>(state.range(0));
  auto acc = dek::DekGrads::zeros_like(model);
  dek::DekBackwardWorkspace ws;
  std::size_t cursor = 0;
  for (auto _ : state) {
    acc.set_zero();
    for (std::size_t b = 0; b < batch; ++b, cursor = (cursor + 1) % pairs.size()) {
      const auto& p = pairs.pairs[cursor];
      const auto e = dek::dek_forward(model, dek::row_span(data.features, p.i), dek::row_span(data.features, p.j));
      dek::dek_backward_accumulate(model, e.trace, e.similarity - pairs.targets[cursor], acc, ws);
    }
    acc *= 1.0 / static_cast<double>(batch);
    dek::apply_update(model, acc, 1e-3);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(batch));
}
BENCHMARK(BM_TrainStep)->Arg(64)->Arg(256);

void BM_Gram(benchmark::State& state) {
  const auto data = dek::make_waveform(static_cast<std::size_t>(state.range(0)), 11);
  const auto model = bench_model(data.dim(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(dek::gram(model, data.features));
}
BENCHMARK(BM_Gram)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_LocalPairing(benchmark::State& state) {
  const auto data = dek::make_waveform(static_cast<std::size_t>(state.range(0)), 13);
  const auto model = bench_model(data.dim(), 1);
  const auto k = dek::gram(model, data.features);
  dek::LocalPairingOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(dek::make_pairs_local(k, data.labels, o));
}
BENCHMARK(BM_LocalPairing)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_KpcaFit(benchmark::State& state) {
  const auto data = dek::make_two_moons(static_cast<std::size_t>(state.range(0)), 0.1, 17);
  const auto k = dek::gram(bench_model(data.dim(), 4), data.features);
  for (auto _ : state) benchmark::DoNotOptimize(dek::kpca_fit(k, 3));
}
BENCHMARK(BM_KpcaFit)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <vector>

#include "catgen/codec.hpp"
#include "catgen/neural.hpp"
#include "fixtures.hpp"

using namespace catgen;

namespace {

LMConfig config(int layers, int d_model) {
  LMConfig c;
  c.n_layers = layers;
  c.n_heads = 4;
  c.d_model = d_model;
  c.d_ff = 4 * d_model;
  c.context_len = 256;
  c.seed = 1;
  return c;
}

}  // namespace

// Sequence of 2 + 6 + 4 * 32 = 136 tokens.
static void BM_Forward(benchmark::State& state) {
  const LanguageModel m = init_lm(config(static_cast<int>(state.range(0)), static_cast<int>(state.range(1))));
  const TokenSeq t = encode(bench::fcc_supercell(2));
  for (auto _ : state) benchmark::DoNotOptimize(lm_forward(m, t));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}
BENCHMARK(BM_Forward)->Args({2, 64})->Args({4, 128})->Unit(benchmark::kMillisecond);

static void BM_LossGrad(benchmark::State& state) {
  const LanguageModel m = init_lm(config(4, 128));
  const std::vector<TokenSeq> batch(8, encode(bench::fcc_supercell(2)));
  for (auto _ : state) benchmark::DoNotOptimize(lm_loss_grad(m, batch));
}
BENCHMARK(BM_LossGrad)->Unit(benchmark::kMillisecond);

static void BM_Sample(benchmark::State& state) {
  const LanguageModel m = init_lm(config(4, 128));
  SampleParams p;
  p.max_len = 128;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample(m, p));
    ++p.seed;
  }
}
BENCHMARK(BM_Sample)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

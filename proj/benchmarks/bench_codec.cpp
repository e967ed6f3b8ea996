// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "catgen/codec.hpp"
#include "fixtures.hpp"

using namespace catgen;

static void BM_Encode(benchmark::State& state) {
  const Structure s = bench::fcc_supercell(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(encode(s));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_Encode)->Arg(1)->Arg(2)->Arg(3);

static void BM_Decode(benchmark::State& state) {
  const TokenSeq t = encode(bench::fcc_supercell(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(decode(t));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}
BENCHMARK(BM_Decode)->Arg(1)->Arg(2)->Arg(3);

static void BM_DecodeBypass(benchmark::State& state) {
  const TokenSeq t = encode(bench::fcc_supercell(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(decode(t, Bypass::on()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}
BENCHMARK(BM_DecodeBypass)->Arg(1)->Arg(2)->Arg(3);

BENCHMARK_MAIN();

// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <vector>

#include "catgen/metrics.hpp"
#include "catgen/rng.hpp"
#include "fixtures.hpp"

using namespace catgen;

static void BM_StructureFingerprint(benchmark::State& state) {
  const Structure s = bench::fcc_supercell(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(structure_fp(s));
}
BENCHMARK(BM_StructureFingerprint)->Arg(1)->Arg(2);

static void BM_Emd1d(benchmark::State& state) {
  Rng rng(1);
  std::vector<double> x(static_cast<std::size_t>(state.range(0))), y(x.size());
  for (double& v : x) v = rng.normal();
  for (double& v : y) v = rng.normal(0.5, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(emd1d(x, y));
}
BENCHMARK(BM_Emd1d)->Range(64, 16384);

static void BM_StructuresMatch(benchmark::State& state) {
  const Structure a = bench::fcc_supercell(2);
  Structure b = a;
  for (auto& site : b.sites) site.frac = wrapped(site.frac.x + 0.013, site.frac.y, site.frac.z);
  for (auto _ : state) benchmark::DoNotOptimize(structures_match(a, b));
}
BENCHMARK(BM_StructuresMatch);

BENCHMARK_MAIN();

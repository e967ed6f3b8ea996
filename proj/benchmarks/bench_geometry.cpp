// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "catgen/geometry.hpp"

using namespace catgen;

static void BM_MinImageDistance(benchmark::State& state) {
  const Lattice lat = state.range(0) ? Lattice{5.1, 6.3, 7.2, 72, 101, 115} : Lattice{8, 8, 8, 90, 90, 90};
  const Mat3 cell = cell_matrix(lat);
  const FracCoord p{0.1, 0.2, 0.3}, q{0.93, 0.71, 0.05};
  for (auto _ : state) benchmark::DoNotOptimize(min_image_distance(cell, p, q));
}
BENCHMARK(BM_MinImageDistance)->Arg(0)->Arg(1)->ArgNames({"skewed"});

static void BM_CellMatrix(benchmark::State& state) {
  const Lattice lat{5.1, 6.3, 7.2, 72, 101, 115};
  for (auto _ : state) benchmark::DoNotOptimize(cell_matrix(lat));
}
BENCHMARK(BM_CellMatrix);

BENCHMARK_MAIN();

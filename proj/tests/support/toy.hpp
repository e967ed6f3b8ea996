// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "catgen/codec.hpp"
#include "catgen/rng.hpp"
#include "catgen/structio.hpp"

namespace catgen::toy {

// Random cell with lengths in [lo, hi] Å and angles in [60, 120]°, redrawn until the
// cell is comfortably non-degenerate.
Lattice random_lattice(Rng& rng, double lo, double hi);

// Arbitrary valid structure: random elements, positions at least `min_sep` Å apart.
Structure random_structure(Rng& rng, std::size_t max_atoms, double max_len, double min_sep = 0.8);

// Near-orthogonal cell (angles 80-100°, lengths within a factor of two) where the
// 27-image search is exact.
Structure tame_structure(Rng& rng, std::size_t max_atoms, double max_len, double min_sep = 0.8);

struct SlabSpec {
  int min_nx = 1, max_nx = 2;
  int min_ny = 1, max_ny = 2;
  int min_layers = 2, max_layers = 3;
  int max_adsorbates = 1;
  double spacing = 2.8;  // in-plane neighbour distance, Å
  double layer_gap = 2.2;
  double vacuum = 10.0;
};

// Binary-alloy slab with tagged bulk/surface layers and O adsorbates placed ontop of
// surface atoms. Sites come out in canonical tag order.
Structure slab(Rng& rng, const SlabSpec& spec = {});
std::vector<Structure> slabs(std::size_t n, std::uint64_t seed, const SlabSpec& spec = {});

std::vector<TokenSeq> encode_all(const std::vector<Structure>& structs);

// Cubic cell with the given sites (fractional).
Structure cubic(double a, std::vector<std::pair<std::string_view, FracCoord>> sites);

}  // namespace catgen::toy

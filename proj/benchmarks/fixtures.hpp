// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "catgen/structio.hpp"

namespace catgen::bench {

// n x n x n fcc supercell of an ordered Pt-Ti alloy, 4 n^3 atoms.
inline Structure fcc_supercell(int n) {
  const double a = 3.9;
  Structure s;
  s.lattice = {a * n, a * n, a * n, 90, 90, 90};
  const double basis[4][3] = {{0, 0, 0}, {0.5, 0.5, 0}, {0.5, 0, 0.5}, {0, 0.5, 0.5}};
  const Element pt = Element::from_symbol("Pt"), ti = Element::from_symbol("Ti");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int b = 0; b < 4; ++b) {
          s.sites.push_back({b == 0 ? ti : pt,
                             {(i + basis[b][0]) / n, (j + basis[b][1]) / n, (k + basis[b][2]) / n},
                             SiteTag::Bulk});
        }
      }
    }
  }
  return s;
}

}  // namespace catgen::bench

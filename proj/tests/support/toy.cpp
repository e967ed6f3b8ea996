// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "toy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "catgen/geometry.hpp"

namespace catgen::toy {
namespace {

constexpr std::array<std::string_view, 12> kHosts = {"Pt", "Pd", "Au", "Ag", "Cu", "Ni",
                                                     "Ti", "V", "Nb", "Mo", "W", "Zn"};

}  // namespace

Lattice random_lattice(Rng& rng, double lo, double hi) {
  for (;;) {
    Lattice lat{rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi),
                rng.uniform(60.0, 120.0), rng.uniform(60.0, 120.0), rng.uniform(60.0, 120.0)};
    if (gram_factor(lat) > 0.2) return lat;
  }
}

namespace {

Structure fill_cell(Rng& rng, std::size_t n, double min_sep, const std::function<Lattice(double)>& make_lattice) {
  for (;;) {
    Structure s;
    // Cell big enough that n hard spheres of diameter min_sep fit easily.
    const double lo = std::max(2.0, std::cbrt(static_cast<double>(n)) * 2.5 * min_sep);
    s.lattice = make_lattice(lo);
    const Mat3 cell = cell_matrix(s.lattice);
    int attempts = 0;
    while (s.sites.size() < n && attempts < 2000) {
      ++attempts;
      const FracCoord f{rng.uniform(), rng.uniform(), rng.uniform()};
      const bool clash = std::any_of(s.sites.begin(), s.sites.end(), [&](const Site& o) {
        return min_image_distance(cell, f, o.frac) < min_sep;
      });
      if (clash) continue;
      s.sites.push_back({Element(1 + static_cast<int>(rng.below(kNumElements))), f, SiteTag::Bulk});
    }
    if (s.sites.size() == n) return s;
  }
}

}  // namespace

Structure random_structure(Rng& rng, std::size_t max_atoms, double max_len, double min_sep) {
  const std::size_t n = 1 + rng.below(max_atoms);
  return fill_cell(rng, n, min_sep, [&](double lo) { return random_lattice(rng, std::min(lo, max_len), max_len); });
}

Structure tame_structure(Rng& rng, std::size_t max_atoms, double max_len, double min_sep) {
  const std::size_t n = 1 + rng.below(max_atoms);
  return fill_cell(rng, n, min_sep, [&](double lo) {
    const double base = rng.uniform(std::min(lo, max_len), max_len);
    return Lattice{base * rng.uniform(0.7, 1.0), base * rng.uniform(0.7, 1.0), base * rng.uniform(0.7, 1.0),
                   rng.uniform(80, 100),        rng.uniform(80, 100),        rng.uniform(80, 100)};
  });
}

Structure slab(Rng& rng, const SlabSpec& spec) {
  const int nx = spec.min_nx + static_cast<int>(rng.below(spec.max_nx - spec.min_nx + 1));
  const int ny = spec.min_ny + static_cast<int>(rng.below(spec.max_ny - spec.min_ny + 1));
  const int nl = spec.min_layers + static_cast<int>(rng.below(spec.max_layers - spec.min_layers + 1));
  const Element host = Element::from_symbol(kHosts[rng.below(kHosts.size())]);
  Element guest = host;
  while (guest == host) guest = Element::from_symbol(kHosts[rng.below(kHosts.size())]);
  const double guest_frac = rng.uniform(0.0, 0.5);
  const double spacing = spec.spacing * rng.uniform(0.95, 1.05);
  const double gap = spec.layer_gap * rng.uniform(0.95, 1.05);
  const double ads_height = rng.uniform(1.85, 2.15);

  Structure s;
  const double slab_height = (nl - 1) * gap;
  s.lattice = Lattice{nx * spacing, ny * spacing, slab_height + spec.vacuum, 90.0, 90.0, 90.0};
  const double z0 = 0.05;
  for (int l = 0; l < nl; ++l) {
    const double shift = (l % 2) * 0.5;
    const double z = z0 + l * gap / s.lattice.c;
    const SiteTag tag = l == nl - 1 ? SiteTag::Surface : SiteTag::Bulk;
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const Element e = rng.uniform() < guest_frac ? guest : host;
        s.sites.push_back({e, wrapped((i + shift) / nx, (j + shift) / ny, z), tag});
      }
    }
  }
  const int n_ads = static_cast<int>(rng.below(spec.max_adsorbates + 1));
  const double top_z = z0 + slab_height / s.lattice.c;
  std::vector<int> spots(static_cast<std::size_t>(nx * ny));
  for (std::size_t k = 0; k < spots.size(); ++k) spots[k] = static_cast<int>(k);
  rng.shuffle(std::span<int>(spots));
  const double shift = ((nl - 1) % 2) * 0.5;
  for (int a = 0; a < n_ads && a < static_cast<int>(spots.size()); ++a) {
    const int i = spots[a] / ny;
    const int j = spots[a] % ny;
    s.sites.push_back({Element::from_symbol("O"),
                       wrapped((i + shift) / nx, (j + shift) / ny, top_z + ads_height / s.lattice.c),
                       SiteTag::Adsorbate});
  }
  return canonicalize(std::move(s));
}

std::vector<Structure> slabs(std::size_t n, std::uint64_t seed, const SlabSpec& spec) {
  std::vector<Structure> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(mix_seed(seed, i));
    Structure s = slab(rng, spec);
    s.id = "toy-" + std::to_string(i);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<TokenSeq> encode_all(const std::vector<Structure>& structs) {
  std::vector<TokenSeq> out;
  out.reserve(structs.size());
  for (const auto& s : structs) out.push_back(encode(s));
  return out;
}

Structure cubic(double a, std::vector<std::pair<std::string_view, FracCoord>> sites) {
  Structure s;
  s.lattice = Lattice{a, a, a, 90.0, 90.0, 90.0};
  for (const auto& [sym, f] : sites) s.sites.push_back({Element::from_symbol(sym), f, SiteTag::Bulk});
  return s;
}

}  // namespace catgen::toy

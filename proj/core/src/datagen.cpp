// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "catgen/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "catgen/error.hpp"

namespace catgen {

std::string_view to_string(CorruptionKind kind) noexcept {
  switch (kind) {
    case CorruptionKind::None: return "none";
    case CorruptionKind::Incomplete: return "incomplete";
    case CorruptionKind::ScaleMismatch: return "scale_mismatch";
    case CorruptionKind::Unspecified: return "unspecified";
  }
  return "unspecified";
}

std::size_t removal_count(std::size_t n_atoms, double fraction) noexcept {
  if (n_atoms < 2) return 0;
  // The slack keeps products such as 0.3 * 10 from rounding up to 4.
  const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n_atoms) - 1e-9));
  return std::min(k, n_atoms - 1);
}

Structure corrupt_incomplete_with_fraction(const Structure& s, double fraction, Rng& rng) {
  const std::size_t n = s.sites.size();
  if (n < 2) throw Error(Errc::TooFewAtoms, "incomplete corruption needs at least 2 atoms");
  const std::size_t k = removal_count(n, fraction);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));
  std::vector<bool> removed(n, false);
  for (std::size_t i = 0; i < k; ++i) removed[order[i]] = true;
  Structure out;
  out.lattice = s.lattice;
  out.id = s.id;
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) out.sites.push_back(s.sites[i]);
  }
  return out;
}

Structure corrupt_incomplete(const Structure& s, Rng& rng) {
  if (s.sites.size() < 2) throw Error(Errc::TooFewAtoms, "incomplete corruption needs at least 2 atoms");
  const double f = rng.uniform(kMinRemovalFraction, kMaxRemovalFraction);
  return corrupt_incomplete_with_fraction(s, f, rng);
}

Structure corrupt_scale_with_factor(const Structure& s, double factor) {
  Structure out = s;
  out.lattice.a *= factor;
  out.lattice.b *= factor;
  out.lattice.c *= factor;
  if (std::max({out.lattice.a, out.lattice.b, out.lattice.c}) > kLatticeScale) {
    throw Error(Errc::LatticeTooLarge, "scaled lattice exceeds 180 Å");
  }
  return out;
}

Structure corrupt_scale(const Structure& s, Rng& rng) {
  return corrupt_scale_with_factor(s, rng.uniform(kMinScaleFactor, kMaxScaleFactor));
}

std::vector<LabeledSeq> build_half_corrupted(const std::vector<Structure>& structs, std::uint64_t seed) {
  const std::size_t n = structs.size();
  if (n < 4) throw Error(Errc::EmptyInput, "half-corrupted set needs at least 4 structures");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span(order));

  const std::size_t n_corrupt = n / 2;
  const std::size_t n_valid = n - n_corrupt;
  const std::size_t n_incomplete = n_corrupt - n_corrupt / 2;

  std::vector<LabeledSeq> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Structure& s = structs[order[k]];
    Rng item_rng(mix_seed(seed, order[k]));
    if (k < n_valid) {
      out.push_back({encode(s), 1, CorruptionKind::None});
    } else if (k < n_valid + n_incomplete) {
      out.push_back({encode(corrupt_incomplete(s, item_rng)), 0, CorruptionKind::Incomplete});
    } else {
      out.push_back({encode(corrupt_scale(s, item_rng)), 0, CorruptionKind::ScaleMismatch});
    }
  }
  return out;
}

Structure translate_by(const Structure& s, const FracCoord& shift) {
  Structure out = s;
  for (auto& site : out.sites) {
    site.frac = wrapped(site.frac.x + shift.x, site.frac.y + shift.y, site.frac.z + shift.z);
  }
  return out;
}

Structure augment_translate(const Structure& s, Rng& rng) {
  const double x = rng.uniform();
  const double y = rng.uniform();
  const double z = rng.uniform();
  return translate_by(s, {x, y, z});
}

Structure rotate_by(const Structure& s, double theta) {
  const Mat3 cell = cell_matrix(s.lattice);
  const Vec3 center = frac_to_cart(cell, {0.5, 0.5, 0.0});
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  Structure out = s;
  for (auto& site : out.sites) {
    const Vec3 r = frac_to_cart(cell, site.frac);
    const double dx = r.x() - center.x();
    const double dy = r.y() - center.y();
    const Vec3 rotated(center.x() + c * dx - sn * dy, center.y() + sn * dx + c * dy, r.z());
    site.frac = cart_to_frac(cell, rotated);
  }
  return out;
}

Structure augment_rotate(const Structure& s, Rng& rng) {
  return rotate_by(s, rng.uniform(0.0, 2.0 * std::numbers::pi));
}

Structure augment_permute(const Structure& s, Rng& rng) {
  Structure out = s;
  rng.shuffle(std::span(out.sites));
  return out;
}

std::vector<Structure> build_augmented(const std::vector<Structure>& structs, const AugmentSpec& spec) {
  const double sum = spec.translate + spec.rotate + spec.unchanged;
  if (spec.translate < 0 || spec.rotate < 0 || spec.unchanged < 0 || std::abs(sum - 1.0) > 1e-9) {
    throw Error(Errc::BadRatios, "augmentation fractions must be non-negative and sum to 1");
  }
  const std::size_t n = structs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(std::span(order));
  const auto n_translate = std::min(n, static_cast<std::size_t>(std::llround(spec.translate * static_cast<double>(n))));
  const auto n_rotate =
      std::min(n - n_translate, static_cast<std::size_t>(std::llround(spec.rotate * static_cast<double>(n))));

  std::vector<Structure> out = structs;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    Rng item_rng(mix_seed(spec.seed, i));
    if (k < n_translate) {
      out[i] = augment_translate(structs[i], item_rng);
    } else if (k < n_translate + n_rotate) {
      out[i] = augment_rotate(structs[i], item_rng);
    }
  }
  return out;
}

void write_labeled(const std::vector<LabeledSeq>& seqs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  for (const auto& s : seqs) out << s.label << '\t' << to_token_string(s.tokens) << '\n';
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

std::vector<LabeledSeq> read_labeled(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<LabeledSeq> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.size() < 2 || (line[0] != '0' && line[0] != '1') || line[1] != '\t') {
      throw ParseError(line_no, "expected '0\\t' or '1\\t' prefix");
    }
    LabeledSeq item;
    item.label = line[0] - '0';
    item.kind = item.label == 1 ? CorruptionKind::None : CorruptionKind::Unspecified;
    item.tokens = parse_token_string(std::string_view(line).substr(2), line_no);
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace catgen

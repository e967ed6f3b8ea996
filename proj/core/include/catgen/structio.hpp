// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

// Structure data model, JSON-Lines dataset files, tagging and splits.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "catgen/elements.hpp"
#include "catgen/geometry.hpp"

namespace catgen {

enum class SiteTag : std::uint8_t { Bulk = 0, Surface = 1, Adsorbate = 2 };

std::string_view to_string(SiteTag tag) noexcept;

struct Site {
  Element element;
  FracCoord frac;
  SiteTag tag = SiteTag::Bulk;

  friend bool operator==(const Site&, const Site&) = default;
};

struct Structure {
  Lattice lattice;
  std::vector<Site> sites;
  std::string id;

  std::size_t size() const noexcept { return sites.size(); }
  friend bool operator==(const Structure&, const Structure&) = default;
};

struct DatasetSplit {
  std::vector<Structure> train;
  std::vector<Structure> val;
  std::vector<Structure> test;
  std::uint64_t seed = 0;
};

// One JSON object per structure, no trailing newline. Field order fixed.
std::string to_json_line(const Structure& s);

// Throws ParseError(line, ...) on malformed input and UnknownElement for bad
// symbols. Unknown keys are ignored; a missing "tag" means bulk. Fractional
// coordinates are wrapped into [0, 1).
Structure parse_structure_line(std::string_view line, std::size_t line_no = 1);

// Blank lines are skipped but still counted for error line numbers.
std::vector<Structure> read_dataset(const std::filesystem::path& path);

// Throws Error(IoError) when the file cannot be written.
void write_dataset(const std::vector<Structure>& structs, const std::filesystem::path& path);

// Stable reorder into Bulk, Surface, Adsorbate blocks.
Structure canonicalize(Structure s);
bool is_canonical(const Structure& s) noexcept;

inline constexpr double kDefaultSurfaceBand = 1.0;  // Å

// Heuristic tagging: adsorbate-species atoms strictly above every other atom
// are Adsorbate; remaining atoms within `surface_band` of the highest
// remaining z are Surface; the rest are Bulk. Approximates the OC20 tags for
// structures that carry none (e.g. decoded token sequences).
Structure assign_tags(Structure s, double surface_band = kDefaultSurfaceBand);

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

// Seeded shuffle then cut. Sizes: val = round(val*n), test = round(test*n),
// train takes the remainder. Throws BadRatios unless ratios are non-negative
// and sum to 1 within 1e-9.
DatasetSplit split_dataset(const std::vector<Structure>& structs, SplitRatios ratios, std::uint64_t seed);

}  // namespace catgen

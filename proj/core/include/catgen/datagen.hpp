// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

// Anomaly synthesis (incomplete / scale-mismatched structures) and data
// augmentation (translation, in-plane rotation, site permutation).

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "catgen/codec.hpp"
#include "catgen/rng.hpp"
#include "catgen/structio.hpp"

namespace catgen {

// Unspecified marks label-0 records read back from a labeled file, which
// stores only the label.
enum class CorruptionKind : std::uint8_t { None, Incomplete, ScaleMismatch, Unspecified };

std::string_view to_string(CorruptionKind kind) noexcept;

// label 1 = valid, 0 = corrupted; label 1 iff kind None.
struct LabeledSeq {
  TokenSeq tokens;
  int label = 1;
  CorruptionKind kind = CorruptionKind::None;

  friend bool operator==(const LabeledSeq&, const LabeledSeq&) = default;
};

inline constexpr double kMinRemovalFraction = 0.2;
inline constexpr double kMaxRemovalFraction = 0.8;
inline constexpr double kMinScaleFactor = 1.5;
inline constexpr double kMaxScaleFactor = 2.0;

// Number of atoms removed for fraction f: ceil(f*N), capped so one remains.
std::size_t removal_count(std::size_t n_atoms, double fraction) noexcept;

// Removes ceil(f*N) sites, f ~ U[0.2, 0.8], uniformly without replacement;
// survivors keep their relative order. Throws TooFewAtoms for N < 2.
Structure corrupt_incomplete(const Structure& s, Rng& rng);
Structure corrupt_incomplete_with_fraction(const Structure& s, double fraction, Rng& rng);

// Multiplies a, b, c by one k ~ U[1.5, 2.0]; fractional coordinates and
// angles untouched. Throws LatticeTooLarge when a length would exceed 180 Å.
Structure corrupt_scale(const Structure& s, Rng& rng);
Structure corrupt_scale_with_factor(const Structure& s, double factor);

// Seeded: half untouched (label 1), a quarter incomplete, a quarter scaled
// (label 0). Output order is the shuffled input order. Throws EmptyInput for
// fewer than 4 structures.
std::vector<LabeledSeq> build_half_corrupted(const std::vector<Structure>& structs, std::uint64_t seed);

// Adds one random fractional vector to every site, wrapping into [0, 1).
Structure augment_translate(const Structure& s, Rng& rng);
Structure translate_by(const Structure& s, const FracCoord& shift);

// Rotates Cartesian positions about the z-parallel axis through fractional
// (0.5, 0.5) by theta ~ U[0, 2pi), then converts back to wrapped fractions.
Structure augment_rotate(const Structure& s, Rng& rng);
Structure rotate_by(const Structure& s, double theta);

// Uniform shuffle of sites; breaks canonical order on purpose.
Structure augment_permute(const Structure& s, Rng& rng);

struct AugmentSpec {
  double translate = 1.0 / 3.0;
  double rotate = 1.0 / 3.0;
  double unchanged = 1.0 / 3.0;
  std::uint64_t seed = 0;
};

// Seeded partition: round(translate*N) items translated, round(rotate*N)
// rotated (clamped to what remains), the rest unchanged. Item i draws from
// its own stream mix_seed(seed, i). Throws BadRatios for an invalid spec.
std::vector<Structure> build_augmented(const std::vector<Structure>& structs, const AugmentSpec& spec);

// "<label>\t<token string>" per line.
void write_labeled(const std::vector<LabeledSeq>& seqs, const std::filesystem::path& path);
std::vector<LabeledSeq> read_labeled(const std::filesystem::path& path);

}  // namespace catgen

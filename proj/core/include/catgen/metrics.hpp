// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

// Evaluation metrics for generated structures: validity, fingerprint
// coverage, property-distribution EMD, diversity, 2e-ORR rule validity and
// descriptor screening.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "catgen/codec.hpp"
#include "catgen/neural.hpp"
#include "catgen/structio.hpp"

namespace catgen {

// ---------------------------------------------------------------- validity

inline constexpr double kMinAtomDistance = 0.5;  // Å
inline constexpr double kMinCellVolume = 0.1;    // Å^3

// Smallest min-image distance over all site pairs; +inf for < 2 sites.
double min_pair_distance(const Structure& s);

// No pair closer than 0.5 Å and cell volume >= 0.1 Å^3. A degenerate
// lattice is structurally invalid.
bool structural_validity(const Structure& s);

// Fraction of sequences the detector scores >= 0.5. Over-long or otherwise
// unscorable sequences count as invalid. Throws EmptyInput.
double catalyst_validity(const DetectorModel& detector, const std::vector<TokenSeq>& seqs);

// ------------------------------------------------------------ fingerprints

inline constexpr std::size_t kFingerprintSize = 32;
using Fingerprint = std::array<double, kFingerprintSize>;

struct FingerprintPair {
  Fingerprint structure_fp{};
  Fingerprint composition_fp{};
};

// For each of the 8 element properties: stoichiometry-weighted mean, min,
// max and range over non-adsorbate sites (all sites if every site is an
// adsorbate).
Fingerprint composition_fp(const Structure& s);

inline constexpr double kNeighborCutoff = 6.0;  // Å
inline constexpr double kHistogramBin = 0.2;    // Å
inline constexpr std::size_t kHistogramBins = 30;

// Mean over sites of the L1-normalized histogram of min-image neighbor
// distances below 6 Å (0.2 Å bins), followed by the mean and population
// standard deviation of per-site neighbor counts.
Fingerprint structure_fp(const Structure& s);

FingerprintPair fingerprints(const Structure& s);

double fp_distance(const Fingerprint& a, const Fingerprint& b);

// ---------------------------------------------------------------- coverage

struct CoverageCutoffs {
  double structure = 0.0;
  double composition = 0.0;
};

// 2/3 of the mean of the full n x n Euclidean distance matrix of each
// fingerprint kind. Throws EmptyInput for fewer than 2 structures.
CoverageCutoffs calibrate_cutoffs(const std::vector<Structure>& reference);
CoverageCutoffs calibrate_cutoffs(const std::vector<FingerprintPair>& reference);

struct CoverageReport {
  double recall = 0.0;
  double precision = 0.0;
  CoverageCutoffs cutoffs;
};

// Recall: fraction of gt items with some gen item within both cutoffs at
// once; precision: the same with roles swapped. Throws EmptyInput.
CoverageReport coverage(const std::vector<Structure>& gen, const std::vector<Structure>& gt, CoverageCutoffs cutoffs);
CoverageReport coverage(const std::vector<FingerprintPair>& gen, const std::vector<FingerprintPair>& gt,
                        CoverageCutoffs cutoffs);

// ------------------------------------------------------- property distance

// Exact 1-D earth mover's distance: integral of |F_x - F_y| between the
// empirical CDFs. Throws EmptyInput.
double emd1d(std::span<const double> xs, std::span<const double> ys);

struct PropertyReport {
  double emd_density = 0.0;  // g/cm^3
  double emd_nel = 0.0;      // unique-element count
};

std::size_t unique_element_count(const Structure& s);
PropertyReport property_emd(const std::vector<Structure>& gen, const std::vector<Structure>& gt);

// --------------------------------------------------------------- diversity

struct MatchTolerance {
  double length_rtol = 0.2;
  double angle_atol = 5.0;  // degrees
  double site_tol = 0.3;    // in units of (V/N)^(1/3)
};

// Simplified duplicate test: same composition and atom count, lattices
// within tolerance, and some same-element anchor translation after which
// greedy nearest-site matching has mean distance <= site_tol * (V/N)^(1/3).
// Symmetric; not transitive.
bool structures_match(const Structure& a, const Structure& b, const MatchTolerance& tol = {});

struct DiversityReport {
  double uniqueness = 0.0;
  double novelty = 0.0;
  std::size_t n_valid = 0;
  std::size_t n_unique = 0;
  std::size_t n_novel = 0;
  MatchTolerance tolerance;
};

// Greedy first-seen clustering in input order. Throws EmptyInput.
double uniqueness(const std::vector<Structure>& valid_gen, const MatchTolerance& tol = {});
std::size_t count_unique(const std::vector<Structure>& valid_gen, const MatchTolerance& tol = {});
// Fraction of gen items matching no training item. Throws EmptyInput.
double novelty(const std::vector<Structure>& valid_gen, const std::vector<Structure>& train,
               const MatchTolerance& tol = {});
std::size_t count_novel(const std::vector<Structure>& valid_gen, const std::vector<Structure>& train,
                        const MatchTolerance& tol = {});

// ---------------------------------------------------------- 2e-ORR rules

struct RoleConfig {
  std::set<Element> oxophilic;
  std::set<Element> oxophobic;
  std::set<Element> adsorbates;  // reaction adsorbate species
  double ontop_ratio = 1.2;
  double bond_cutoff = 2.6;  // Å

  // Example oxophilic {Ti, V, Nb, Ta, Mo, W}, oxophobic {Au, Ag, Cu, Pd,
  // Pt, Zn}, adsorbate {O}. Real studies should supply their own sets.
  static RoleConfig defaults();
};

// Throws BadConfig when the oxophilic and oxophobic sets intersect.
void validate(const RoleConfig& rc);

// Non-adsorbate sites hold exactly two elements, one oxophilic and one
// oxophobic.
bool composition_validity(const Structure& s, const RoleConfig& rc);

// Every reaction adsorbate sits on top of one oxophilic atom: nearest host
// neighbor oxophilic with d1 <= bond_cutoff and d2 / d1 >= ontop_ratio.
// Throws NoAdsorbate when the structure has no reaction adsorbate.
bool adsorption_validity(const Structure& s, const RoleConfig& rc);

// ---------------------------------------------------------------- screening

inline constexpr double kActivityLow = 3.22;       // eV, exclusive
inline constexpr double kActivityHigh = 5.22;      // eV, exclusive
inline constexpr double kSelectivityMin = 3.52;    // eV, exclusive (dG_O* above dG_H2O2*)
inline constexpr double kOptimalOOH = 4.22;        // eV
inline constexpr double kOptimalBand = 0.2;        // eV, inclusive

struct ScreeningRecord {
  std::string id;
  double dG_OOH = 0.0;
  double dG_O = 0.0;
  std::string source;

  friend bool operator==(const ScreeningRecord&, const ScreeningRecord&) = default;
};

struct ScreeningResult {
  std::vector<ScreeningRecord> passed;
  std::vector<ScreeningRecord> near_optimal;
};

// passed: 3.22 < dG_OOH < 5.22 and dG_O > 3.52; near_optimal: passed with
// |dG_OOH - 4.22| <= 0.2. Throws OutOfRange for non-finite energies.
ScreeningResult screen(const std::vector<ScreeningRecord>& records);

// JSON Lines {"id", "dG_OOH", "dG_O", optional "source"}. Throws ParseError.
std::vector<ScreeningRecord> read_screening_records(const std::filesystem::path& path);

}  // namespace catgen

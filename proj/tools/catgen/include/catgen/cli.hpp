// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

// Pipeline orchestration behind the `catgen` command-line tool.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "catgen/datagen.hpp"
#include "catgen/metrics.hpp"
#include "catgen/neural.hpp"
#include "catgen/report.hpp"

namespace catgen::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kPartial = 2 };

struct Paths {
  std::filesystem::path input;
  std::filesystem::path output;
  std::filesystem::path train;
  std::filesystem::path val;
  std::filesystem::path gt;
  std::filesystem::path gen;
  std::filesystem::path checkpoint;
  std::filesystem::path init_checkpoint;
  std::filesystem::path detector;
  std::filesystem::path lattices;
};

struct SampleDefaults {
  std::size_t n = 100;
  double temperature = 1.0;
  std::size_t max_len = 512;
  std::optional<double> bypass;  // minimum distance in Å; nullopt = off
  bool lattice_prompt = false;
  std::vector<double> temperatures = {0.5, 1.0, 1.5, 2.0};
};

struct MetricOptions {
  std::optional<double> struct_cutoff;  // nullopt: calibrate on gt
  std::optional<double> comp_cutoff;
  std::size_t property_sample = 500;
  MatchTolerance tolerance;
};

struct RunConfig {
  std::filesystem::path run_dir;  // empty: runs/<command>-<hash prefix>
  Paths paths;
  LMConfig model;
  TrainConfig train;
  SampleDefaults sample;
  AugmentSpec augment;
  std::optional<RoleConfig> roles;
  MetricOptions metrics;
  bool keep_order = false;  // encode sites in stored order
  std::optional<std::uint64_t> seed;
};

// Missing keys keep their defaults; unknown keys are rejected. Throws
// BadConfig.
RunConfig config_from_json(const std::string& text);
// Canonical JSON of every field, defaults included.
std::string config_to_json(const RunConfig& cfg);
// Hex SHA-256 of config_to_json(cfg).
std::string config_hash(const RunConfig& cfg);

// ------------------------------------------------------------ generation

struct GenerateOptions {
  std::size_t n = 100;
  double temperature = 1.0;
  std::size_t max_len = 512;
  std::uint64_t seed = 0;
  std::vector<Lattice> lattices;  // non-empty: one sample per lattice
};

struct Generated {
  std::vector<TokenSeq> tokens;
  std::vector<bool> truncated;
};

// Item i samples with seed mix_seed(seed, i), so the same seed draws the
// same stream at every temperature.
Generated generate(const LanguageModel& m, const GenerateOptions& opts);

// ------------------------------------------------------------ evaluation

struct EvalInputs {
  const std::vector<TokenSeq>* gen = nullptr;
  const std::vector<Structure>* gt = nullptr;
  const std::vector<Structure>* train = nullptr;  // optional; enables diversity
  const DetectorModel* detector = nullptr;        // optional
  const RoleConfig* roles = nullptr;              // optional; 2e-ORR mode
  Bypass bypass = Bypass::off();
  MetricOptions metrics;
  std::uint64_t seed = 0;
  std::optional<double> temperature;
};

// Generation validity over all sequences. Structural, catalyst and 2e-ORR
// validity and coverage over generation-valid items. Property EMD over a
// seeded sub-sample of at most metrics.property_sample items passing every
// validity check; diversity over all such items. A section whose population
// is empty is left unset. Throws EmptyInput for empty gen or gt.
EvaluationReport evaluate(const EvalInputs& in);

// ------------------------------------------------------------ entry point

// args excludes the program name. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace catgen::cli

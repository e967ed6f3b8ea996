// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

// Aggregate evaluation reports, their JSON form and plain-text tables laid
// out as Validity | Coverage | Property Distribution | 2e-ORR Validity |
// Diversity.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catgen/metrics.hpp"

namespace catgen {

struct Ratio {
  std::size_t numerator = 0;
  std::size_t denominator = 0;

  double value() const noexcept {
    return denominator == 0 ? 0.0 : static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

struct ValidityReport {
  Ratio generation;
  Ratio structural;
  std::optional<Ratio> catalyst;     // needs a detector
  std::optional<Ratio> composition;  // 2e-ORR mode
  std::optional<Ratio> adsorption;   // 2e-ORR mode
  std::optional<Ratio> orr;          // composition and adsorption together
};

struct EvaluationReport {
  std::optional<double> temperature;
  ValidityReport validity;
  std::optional<CoverageReport> coverage;
  std::optional<PropertyReport> property;
  std::optional<DiversityReport> diversity;
  std::size_t n_generated = 0;
  std::size_t n_fully_valid = 0;
};

// Deterministic JSON text (fixed key order). A list serializes as
// {"reports": [...]}.
std::string report_json(const EvaluationReport& r, int indent = 2);
std::string report_json(const std::vector<EvaluationReport>& rows, int indent = 2);

// Aligned text table, one row per report. Missing values and rates over an
// empty population print as "-".
std::string format_table(const std::vector<EvaluationReport>& rows);

// CSV with one row per report and the same columns as format_table.
std::string format_csv(const std::vector<EvaluationReport>& rows);

}  // namespace catgen

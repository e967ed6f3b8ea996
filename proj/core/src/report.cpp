// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "catgen/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace catgen {
namespace {

struct Column {
  const char* group;
  const char* name;
};

constexpr Column kColumns[] = {
    {"", "Temperature"},          {"Validity", "Generation"},    {"Validity", "Structural"},
    {"Validity", "Catalyst"},     {"Coverage", "Recall"},        {"Coverage", "Precision"},
    {"Property Distribution", "rho"}, {"Property Distribution", "N_el"}, {"2e-ORR Validity", "Composition"},
    {"2e-ORR Validity", "Adsorption"}, {"Diversity", "Uniqueness"}, {"Diversity", "Novelty"},
};

std::string fmt(std::optional<double> v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

// An empty population has no rate; it prints as "-".
std::optional<double> ratio(const std::optional<Ratio>& r) {
  return r && r->denominator ? std::optional<double>(r->value()) : std::nullopt;
}

std::vector<std::string> cells(const EvaluationReport& r) {
  std::vector<std::optional<double>> v = {
      r.temperature,
      ratio(r.validity.generation),
      ratio(r.validity.structural),
      ratio(r.validity.catalyst),
      r.coverage ? std::optional(r.coverage->recall) : std::nullopt,
      r.coverage ? std::optional(r.coverage->precision) : std::nullopt,
      r.property ? std::optional(r.property->emd_density) : std::nullopt,
      r.property ? std::optional(r.property->emd_nel) : std::nullopt,
      ratio(r.validity.composition),
      ratio(r.validity.adsorption),
      r.diversity ? std::optional(r.diversity->uniqueness) : std::nullopt,
      r.diversity ? std::optional(r.diversity->novelty) : std::nullopt,
  };
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(fmt(x));
  return out;
}

nlohmann::ordered_json to_json(const Ratio& r) {
  return {{"value", r.value()}, {"numerator", r.numerator}, {"denominator", r.denominator}};
}

nlohmann::ordered_json to_json(const ValidityReport& r) {
  nlohmann::ordered_json j;
  j["generation"] = to_json(r.generation);
  j["structural"] = to_json(r.structural);
  if (r.catalyst) j["catalyst"] = to_json(*r.catalyst);
  if (r.composition) j["composition"] = to_json(*r.composition);
  if (r.adsorption) j["adsorption"] = to_json(*r.adsorption);
  if (r.orr) j["orr"] = to_json(*r.orr);
  return j;
}

nlohmann::ordered_json to_json(const CoverageReport& r) {
  return {{"recall", r.recall},
          {"precision", r.precision},
          {"struct_cutoff", r.cutoffs.structure},
          {"comp_cutoff", r.cutoffs.composition}};
}

nlohmann::ordered_json to_json(const PropertyReport& r) {
  return {{"emd_density", r.emd_density}, {"emd_nel", r.emd_nel}};
}

nlohmann::ordered_json to_json(const DiversityReport& r) {
  return {{"uniqueness", r.uniqueness},
          {"novelty", r.novelty},
          {"n_valid", r.n_valid},
          {"n_unique", r.n_unique},
          {"n_novel", r.n_novel},
          {"tolerance",
           {{"length_rtol", r.tolerance.length_rtol},
            {"angle_atol", r.tolerance.angle_atol},
            {"site_tol", r.tolerance.site_tol}}}};
}

nlohmann::ordered_json to_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  if (r.temperature) j["temperature"] = *r.temperature;
  j["n_generated"] = r.n_generated;
  j["n_fully_valid"] = r.n_fully_valid;
  j["validity"] = to_json(r.validity);
  j["coverage"] = r.coverage ? to_json(*r.coverage) : nlohmann::ordered_json(nullptr);
  j["property"] = r.property ? to_json(*r.property) : nlohmann::ordered_json(nullptr);
  j["diversity"] = r.diversity ? to_json(*r.diversity) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace

std::string report_json(const EvaluationReport& r, int indent) { return to_json(r).dump(indent); }

std::string report_json(const std::vector<EvaluationReport>& rows, int indent) {
  auto list = nlohmann::ordered_json::array();
  for (const auto& r : rows) list.push_back(to_json(r));
  nlohmann::ordered_json j;
  j["reports"] = std::move(list);
  return j.dump(indent);
}

std::string format_table(const std::vector<EvaluationReport>& rows) {
  constexpr std::size_t n = std::size(kColumns);
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> groups, names;
  for (const auto& c : kColumns) {
    groups.emplace_back(c.group);
    names.emplace_back(c.name);
  }
  grid.push_back(groups);
  grid.push_back(names);
  for (const auto& r : rows) grid.push_back(cells(r));
  std::vector<std::size_t> width(n, 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < n; ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::ostringstream os;
  for (std::size_t li = 0; li < grid.size(); ++li) {
    for (std::size_t i = 0; i < n; ++i) {
      std::string cell = grid[li][i];
      // Print each group label once, above its first column.
      if (li == 0 && i > 0 && grid[0][i] == grid[0][i - 1]) cell.clear();
      if (i) os << (li == 0 || kColumns[i].group != std::string_view(kColumns[i - 1].group) ? " | " : "   ");
      os << cell << std::string(width[i] - cell.size(), ' ');
    }
    os << '\n';
  }
  return os.str();
}

std::string format_csv(const std::vector<EvaluationReport>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < std::size(kColumns); ++i) {
    if (i) os << ',';
    os << (kColumns[i].group[0] ? std::string(kColumns[i].group) + " " : std::string()) << kColumns[i].name;
  }
  os << '\n';
  for (const auto& r : rows) {
    const auto c = cells(r);
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << '\n';
  }
  return os.str();
}

}  // namespace catgen

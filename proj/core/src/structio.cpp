// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "catgen/structio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "catgen/error.hpp"
#include "catgen/rng.hpp"

namespace catgen {
namespace {

using nlohmann::json;

SiteTag parse_tag(const std::string& s, std::size_t line_no) {
  if (s == "bulk") return SiteTag::Bulk;
  if (s == "surface") return SiteTag::Surface;
  if (s == "adsorbate") return SiteTag::Adsorbate;
  throw ParseError(line_no, "unknown tag '" + s + "'");
}

double number_at(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ParseError(line_no, std::string("missing or non-numeric '") + key + "'");
  }
  return it->get<double>();
}

}  // namespace

std::string_view to_string(SiteTag tag) noexcept {
  switch (tag) {
    case SiteTag::Bulk: return "bulk";
    case SiteTag::Surface: return "surface";
    case SiteTag::Adsorbate: return "adsorbate";
  }
  return "bulk";
}

std::string to_json_line(const Structure& s) {
  // ordered_json keeps insertion order so output is byte-stable.
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["lattice"] = {{"a", s.lattice.a},         {"b", s.lattice.b},        {"c", s.lattice.c},
                  {"alpha", s.lattice.alpha}, {"beta", s.lattice.beta}, {"gamma", s.lattice.gamma}};
  auto sites = nlohmann::ordered_json::array();
  for (const auto& site : s.sites) {
    nlohmann::ordered_json o;
    o["element"] = std::string(site.element.symbol());
    o["frac"] = {site.frac.x, site.frac.y, site.frac.z};
    o["tag"] = std::string(to_string(site.tag));
    sites.push_back(std::move(o));
  }
  j["sites"] = std::move(sites);
  return j.dump();
}

Structure parse_structure_line(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_no, e.what());
  }
  if (!j.is_object()) throw ParseError(line_no, "record is not a JSON object");

  Structure s;
  if (auto it = j.find("id"); it != j.end()) {
    if (it->is_string()) {
      s.id = it->get<std::string>();
    } else if (it->is_number()) {
      s.id = it->dump();
    } else {
      throw ParseError(line_no, "'id' must be a string");
    }
  }
  auto lat = j.find("lattice");
  if (lat == j.end() || !lat->is_object()) throw ParseError(line_no, "missing 'lattice' object");
  s.lattice = {number_at(*lat, "a", line_no),     number_at(*lat, "b", line_no),
               number_at(*lat, "c", line_no),     number_at(*lat, "alpha", line_no),
               number_at(*lat, "beta", line_no),  number_at(*lat, "gamma", line_no)};

  auto sites = j.find("sites");
  if (sites == j.end() || !sites->is_array()) throw ParseError(line_no, "missing 'sites' array");
  s.sites.reserve(sites->size());
  for (const auto& o : *sites) {
    if (!o.is_object()) throw ParseError(line_no, "site is not an object");
    auto el = o.find("element");
    if (el == o.end() || !el->is_string()) throw ParseError(line_no, "site without 'element'");
    auto fr = o.find("frac");
    if (fr == o.end() || !fr->is_array() || fr->size() != 3 ||
        !std::all_of(fr->begin(), fr->end(), [](const json& v) { return v.is_number(); })) {
      throw ParseError(line_no, "site 'frac' must be an array of 3 numbers");
    }
    Site site;
    site.element = Element::from_symbol(el->get<std::string>());
    const double x = (*fr)[0].get<double>();
    const double y = (*fr)[1].get<double>();
    const double z = (*fr)[2].get<double>();
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw ParseError(line_no, "non-finite fractional coordinate");
    }
    site.frac = wrapped(x, y, z);
    if (auto tag = o.find("tag"); tag != o.end()) {
      if (!tag->is_string()) throw ParseError(line_no, "'tag' must be a string");
      site.tag = parse_tag(tag->get<std::string>(), line_no);
    }
    s.sites.push_back(site);
  }
  return s;
}

std::vector<Structure> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<Structure> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    out.push_back(parse_structure_line(line, line_no));
  }
  return out;
}

void write_dataset(const std::vector<Structure>& structs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  for (const auto& s : structs) out << to_json_line(s) << '\n';
  out.flush();
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

Structure canonicalize(Structure s) {
  std::stable_sort(s.sites.begin(), s.sites.end(),
                   [](const Site& l, const Site& r) { return l.tag < r.tag; });
  return s;
}

bool is_canonical(const Structure& s) noexcept {
  return std::is_sorted(s.sites.begin(), s.sites.end(),
                        [](const Site& l, const Site& r) { return l.tag < r.tag; });
}

Structure assign_tags(Structure s, double surface_band) {
  if (s.sites.empty()) return s;
  const Mat3 cell = cell_matrix(s.lattice);
  std::vector<double> z(s.sites.size());
  for (std::size_t i = 0; i < s.sites.size(); ++i) z[i] = frac_to_cart(cell, s.sites[i].frac).z();

  double top_host = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.sites.size(); ++i) {
    if (!element_properties(s.sites[i].element).is_adsorbate_species) top_host = std::max(top_host, z[i]);
  }
  std::vector<bool> adsorbate(s.sites.size(), false);
  double top_rest = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.sites.size(); ++i) {
    adsorbate[i] = element_properties(s.sites[i].element).is_adsorbate_species && z[i] > top_host;
    if (!adsorbate[i]) top_rest = std::max(top_rest, z[i]);
  }
  for (std::size_t i = 0; i < s.sites.size(); ++i) {
    if (adsorbate[i]) {
      s.sites[i].tag = SiteTag::Adsorbate;
    } else if (z[i] >= top_rest - surface_band) {
      s.sites[i].tag = SiteTag::Surface;
    } else {
      s.sites[i].tag = SiteTag::Bulk;
    }
  }
  return s;
}

DatasetSplit split_dataset(const std::vector<Structure>& structs, SplitRatios ratios, std::uint64_t seed) {
  const double sum = ratios.train + ratios.val + ratios.test;
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 || std::abs(sum - 1.0) > 1e-9) {
    throw Error(Errc::BadRatios, "split ratios must be non-negative and sum to 1");
  }
  const std::size_t n = structs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span(order));

  const auto n_val = static_cast<std::size_t>(std::llround(ratios.val * static_cast<double>(n)));
  const auto n_test = std::min(n - std::min(n, n_val),
                               static_cast<std::size_t>(std::llround(ratios.test * static_cast<double>(n))));
  const std::size_t n_train = n - std::min(n, n_val) - n_test;

  DatasetSplit split;
  split.seed = seed;
  for (std::size_t k = 0; k < n; ++k) {
    const Structure& s = structs[order[k]];
    if (k < n_train) {
      split.train.push_back(s);
    } else if (k < n_train + n_val) {
      split.val.push_back(s);
    } else {
      split.test.push_back(s);
    }
  }
  return split;
}

}  // namespace catgen

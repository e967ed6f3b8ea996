// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "catgen/error.hpp"
#include "catgen/structio.hpp"
#include "toy.hpp"

using namespace catgen;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "catgen_test_structio";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::multiset<std::string> ids(const std::vector<Structure>& v) {
  std::multiset<std::string> out;
  for (const auto& s : v) out.insert(s.id);
  return out;
}

}  // namespace

TEST_CASE("single-line file") {
  const auto p = temp_file("one.jsonl");
  write_text(p, R"({"id":"s0001","lattice":{"a":10.0,"b":10.0,"c":20.0,"alpha":90.0,"beta":90.0,"gamma":90.0},)"
                R"("sites":[{"element":"Pt","frac":[0.0,0.0,0.25]}],"extra":1})"
                "\n");
  const auto ds = read_dataset(p);
  REQUIRE(ds.size() == 1);
  CHECK(ds[0].id == "s0001");
  CHECK(ds[0].lattice.c == 20.0);
  REQUIRE(ds[0].sites.size() == 1);
  CHECK(ds[0].sites[0].element.symbol() == "Pt");
  CHECK(ds[0].sites[0].tag == SiteTag::Bulk);
  CHECK(ds[0].sites[0].frac.z == 0.25);
}

TEST_CASE("malformed line reports its line number") {
  const auto p = temp_file("bad.jsonl");
  const std::string good = R"({"id":"a","lattice":{"a":5,"b":5,"c":5,"alpha":90,"beta":90,"gamma":90},"sites":[]})";
  write_text(p, good + "\n" + good + "\n{\"id\": oops\n");
  try {
    read_dataset(p);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  write_text(p, R"({"id":"a","lattice":{"a":5,"b":5,"c":5,"alpha":90,"beta":90,"gamma":90},"sites":[{"element":"Xx","frac":[0,0,0]}]})");
  CHECK_THROWS_AS(read_dataset(p), Error);
  CHECK_THROWS_AS(read_dataset(temp_file("does-not-exist.jsonl")), Error);
}

TEST_CASE("write/read round trip is bit-exact") {
  Rng rng(21);
  std::vector<Structure> v;
  for (int i = 0; i < 100; ++i) {
    Structure s = toy::random_structure(rng, 12, 30.0);
    s.id = "r" + std::to_string(i);
    for (auto& site : s.sites) site.tag = static_cast<SiteTag>(rng.below(3));
    v.push_back(std::move(s));
  }
  const auto p = temp_file("rt.jsonl");
  write_dataset(v, p);
  CHECK(read_dataset(p) == v);

  write_dataset({}, p);
  CHECK(fs::file_size(p) == 0);
  CHECK(read_dataset(p).empty());
  CHECK_THROWS_AS(write_dataset(v, "/nonexistent-dir/x/y.jsonl"), Error);
}

TEST_CASE("canonicalize") {
  Structure s = toy::cubic(10, {{"O", {0.5, 0.5, 0.9}}, {"Pt", {0, 0, 0}}, {"Pd", {0.5, 0, 0.3}}, {"Au", {0, 0.5, 0}}});
  s.sites[0].tag = SiteTag::Adsorbate;
  s.sites[2].tag = SiteTag::Surface;
  const Structure c = canonicalize(s);
  CHECK(is_canonical(c));
  CHECK_FALSE(is_canonical(s));
  CHECK(c.sites[0].element.symbol() == "Pt");
  CHECK(c.sites[1].element.symbol() == "Au");
  CHECK(c.sites[2].element.symbol() == "Pd");
  CHECK(c.sites[3].element.symbol() == "O");
  CHECK(canonicalize(c) == c);

  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    Structure r = toy::random_structure(rng, 10, 20.0);
    for (auto& site : r.sites) site.tag = static_cast<SiteTag>(rng.below(3));
    CHECK(canonicalize(canonicalize(r)) == canonicalize(r));
  }
}

TEST_CASE("assign_tags") {
  // Two Pt layers 2 Å apart in a 20 Å cell plus O 2 Å above the top layer.
  Structure s = toy::cubic(20, {{"Pt", {0, 0, 0.1}},
                                {"Pt", {0.5, 0.5, 0.1}},
                                {"Pt", {0, 0, 0.2}},
                                {"Pt", {0.5, 0.5, 0.2}},
                                {"O", {0, 0, 0.3}}});
  const Structure t = assign_tags(s, 1.0);
  CHECK(t.sites[0].tag == SiteTag::Bulk);
  CHECK(t.sites[1].tag == SiteTag::Bulk);
  CHECK(t.sites[2].tag == SiteTag::Surface);
  CHECK(t.sites[3].tag == SiteTag::Surface);
  CHECK(t.sites[4].tag == SiteTag::Adsorbate);

  Structure metal = toy::cubic(10, {{"Cu", {0, 0, 0}}, {"Ni", {0.5, 0.5, 0.5}}});
  const Structure m = assign_tags(metal);
  CHECK(std::none_of(m.sites.begin(), m.sites.end(), [](const Site& x) { return x.tag == SiteTag::Adsorbate; }));

  // At least one Surface atom whenever a non-adsorbate-species atom exists.
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const Structure r = assign_tags(toy::random_structure(rng, 8, 20.0));
    const bool has_host = std::any_of(r.sites.begin(), r.sites.end(), [](const Site& x) {
      return !element_properties(x.element).is_adsorbate_species;
    });
    const bool has_surface =
        std::any_of(r.sites.begin(), r.sites.end(), [](const Site& x) { return x.tag == SiteTag::Surface; });
    if (has_host) CHECK(has_surface);
  }
}

TEST_CASE("split_dataset") {
  std::vector<Structure> v;
  for (int i = 0; i < 10; ++i) {
    Structure s = toy::cubic(5, {{"Pt", {0, 0, 0}}});
    s.id = std::to_string(i);
    v.push_back(s);
  }
  const auto sp = split_dataset(v, {}, 42);
  CHECK(sp.train.size() == 8);
  CHECK(sp.val.size() == 1);
  CHECK(sp.test.size() == 1);
  std::vector<Structure> all = sp.train;
  all.insert(all.end(), sp.val.begin(), sp.val.end());
  all.insert(all.end(), sp.test.begin(), sp.test.end());
  CHECK(ids(all) == ids(v));

  const auto again = split_dataset(v, {}, 42);
  CHECK(again.train == sp.train);
  CHECK(again.val == sp.val);
  CHECK_THROWS_AS(split_dataset(v, {0.5, 0.5, 0.5}, 1), Error);

  std::vector<Structure> many;
  for (int i = 0; i < 997; ++i) {
    Structure s = toy::cubic(5, {{"Pt", {0, 0, 0}}});
    s.id = std::to_string(i);
    many.push_back(s);
  }
  const auto big = split_dataset(many, {0.7, 0.2, 0.1}, 3);
  CHECK(big.train.size() + big.val.size() + big.test.size() == 997);
  CHECK(std::abs(static_cast<double>(big.val.size()) - 199.4) <= 1.0);
  CHECK(std::abs(static_cast<double>(big.test.size()) - 99.7) <= 1.0);
}

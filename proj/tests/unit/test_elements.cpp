// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include "catgen/elements.hpp"
#include "catgen/error.hpp"

using namespace catgen;

TEST_CASE("table covers all 118 elements in order") {
  const auto table = element_table();
  REQUIRE(table.size() == 118);
  std::set<std::string_view> symbols;
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(table[i].atomic_number == static_cast<int>(i) + 1);
    symbols.insert(table[i].symbol);
    for (double v : numeric_properties(table[i])) CHECK(std::isfinite(v));
  }
  CHECK(symbols.size() == 118);
}

TEST_CASE("reference values") {
  const auto& pt = element_properties("Pt");
  CHECK(pt.mass == doctest::Approx(195.084).epsilon(1e-9));
  CHECK(pt.atomic_number == 78);
  CHECK(pt.group == 10);
  CHECK(pt.period == 6);
  CHECK(element_properties("O").is_adsorbate_species);
  CHECK(element_properties("H").is_adsorbate_species);
  CHECK_FALSE(element_properties("Ti").is_adsorbate_species);
  CHECK(element_properties("O").electronegativity == doctest::Approx(3.44));
  CHECK(element_properties("Fe").valence_electrons == 8);
}

TEST_CASE("unknown symbols throw") {
  try {
    element_properties("Xx");
    FAIL("expected UnknownElement");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownElement);
  }
  CHECK_THROWS_AS(Element(0), Error);
  CHECK_THROWS_AS(Element(119), Error);
}

TEST_CASE("Element round trips through its symbol") {
  for (int z = 1; z <= 118; ++z) {
    const Element e(z);
    CHECK(Element::from_symbol(e.symbol()) == e);
    CHECK(element_properties(e).atomic_number == z);
  }
}

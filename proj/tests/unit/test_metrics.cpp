// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "catgen/datagen.hpp"
#include "catgen/error.hpp"
#include "catgen/metrics.hpp"
#include "toy.hpp"

using namespace catgen;

namespace {

Element el(std::string_view s) { return Element::from_symbol(s); }

double euclid(const Fingerprint& a, const Fingerprint& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Equal-size EMD: mean absolute difference of order statistics.
double sorted_matching(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

Fingerprint constant_fp(double v) {
  Fingerprint f{};
  f.fill(v);
  return f;
}

// A slab-like cell with an oxygen above host atoms at the given in-plane and height offsets.
Structure with_adsorbate(std::vector<std::pair<std::string_view, FracCoord>> host, FracCoord o) {
  Structure s;
  s.lattice = {10, 10, 20, 90, 90, 90};
  for (const auto& [sym, f] : host) s.sites.push_back({el(sym), f, SiteTag::Surface});
  s.sites.push_back({el("O"), o, SiteTag::Adsorbate});
  return s;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return Errc::IoError;
}

}  // namespace

TEST_CASE("structural validity") {
  CHECK_FALSE(structural_validity(toy::cubic(10, {{"Pt", {0, 0, 0}}, {"Pt", {0.02, 0, 0}}})));
  CHECK(structural_validity(toy::cubic(10, {{"Pt", {0, 0, 0}}})));
  CHECK(structural_validity(toy::cubic(10, {{"Pt", {0, 0, 0}}, {"Pt", {0.05, 0, 0}}})));
  CHECK_FALSE(structural_validity(toy::cubic(0.4, {{"Pt", {0, 0, 0}}})));
  CHECK(min_pair_distance(toy::cubic(10, {{"Pt", {0, 0, 0}}, {"Pt", {0.95, 0, 0}}})) == doctest::Approx(0.5));
}

TEST_CASE("catalyst validity") {
  LMConfig c{1, 1, 8, 16, 64, kVocabSize, 0.0, 1};
  auto d = init_detector(c);
  const auto w = std::find_if(d.tensors.begin(), d.tensors.end(), [](const TensorInfo& t) { return t.name == "head.w"; });
  const auto b = std::find_if(d.tensors.begin(), d.tensors.end(), [](const TensorInfo& t) { return t.name == "head.b"; });
  std::fill_n(d.weights.begin() + static_cast<long>(w->offset), w->size, 0.0f);
  d.weights[b->offset] = 10.0f;
  const auto seqs = toy::encode_all(toy::slabs(10, 1));
  CHECK(catalyst_validity(d, seqs) == 1.0);
  std::vector<TokenSeq> with_long = seqs;
  with_long.push_back(TokenSeq(100, kBos));
  CHECK(catalyst_validity(d, with_long) == doctest::Approx(10.0 / 11.0));
  CHECK(code_of([&] { catalyst_validity(d, {}); }) == Errc::EmptyInput);
}

TEST_CASE("composition fingerprint") {
  Structure pt = toy::cubic(4, {{"Pt", {0, 0, 0}}, {"Pt", {0.5, 0.5, 0}}, {"Pt", {0, 0.5, 0.5}}});
  const Fingerprint f = composition_fp(pt);
  const auto props = numeric_properties(element_properties("Pt"));
  for (std::size_t p = 0; p < kNumElementProperties; ++p) {
    CHECK(f[4 * p] == doctest::Approx(props[p]));
    CHECK(f[4 * p + 1] == props[p]);
    CHECK(f[4 * p + 2] == props[p]);
    CHECK(f[4 * p + 3] == 0.0);
  }

  Structure alloy = toy::cubic(4, {{"Ti", {0, 0, 0}}, {"Au", {0.5, 0.5, 0}}, {"Ti", {0, 0.5, 0.5}}, {"Au", {0.5, 0, 0.5}}});
  alloy.sites.push_back({el("O"), {0.5, 0.5, 0.9}, SiteTag::Adsorbate});
  const Fingerprint g = composition_fp(alloy);
  const auto ti = numeric_properties(element_properties("Ti"));
  const auto au = numeric_properties(element_properties("Au"));
  for (std::size_t p = 0; p < kNumElementProperties; ++p) {
    CHECK(g[4 * p] == doctest::Approx(0.5 * (ti[p] + au[p])));
    CHECK(g[4 * p + 1] == std::min(ti[p], au[p]));
    CHECK(g[4 * p + 2] == std::max(ti[p], au[p]));
    CHECK(g[4 * p + 3] == doctest::Approx(std::abs(ti[p] - au[p])));
  }

  Rng rng(1);
  for (const auto& s : toy::slabs(20, 2)) CHECK(composition_fp(augment_translate(s, rng)) == composition_fp(s));
}

TEST_CASE("structure fingerprint") {
  const Fingerprint lone = structure_fp(toy::cubic(50, {{"Pt", {0.5, 0.5, 0.5}}}));
  for (double v : lone) CHECK(v == 0.0);

  // Pair 2.1 Å apart in a 20 Å cube: each site sees one neighbour in bin 10.
  const Fingerprint pair = structure_fp(toy::cubic(20, {{"Pt", {0.1, 0.1, 0.1}}, {"Pt", {0.205, 0.1, 0.1}}}));
  for (std::size_t b = 0; b < kHistogramBins; ++b) CHECK(pair[b] == doctest::Approx(b == 10 ? 1.0 : 0.0));
  CHECK(pair[30] == 1.0);
  CHECK(pair[31] == 0.0);

  // Three collinear atoms: ends see one neighbour each, the middle sees two.
  const Fingerprint chain =
      structure_fp(toy::cubic(30, {{"Cu", {0.1, 0.5, 0.5}}, {"Cu", {0.2, 0.5, 0.5}}, {"Cu", {0.31, 0.5, 0.5}}}));
  // Distances 3 Å (bin 15), 3.3 Å (bin 16) and 6.3 Å (beyond cutoff).
  CHECK(chain[15] == doctest::Approx((1.0 + 0.5) / 3.0));
  CHECK(chain[16] == doctest::Approx((0.5 + 1.0) / 3.0));
  CHECK(chain[30] == doctest::Approx(4.0 / 3.0));
  CHECK(chain[31] == doctest::Approx(std::sqrt(2.0) / 3.0));

  Rng rng(3);
  for (const auto& s : toy::slabs(20, 5)) {
    const Fingerprint a = structure_fp(s);
    const Fingerprint b = structure_fp(augment_translate(s, rng));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
    CHECK(structure_fp(s) == a);
  }
}

TEST_CASE("calibrate cutoffs") {
  const auto s = toy::slabs(1, 1)[0];
  const auto zero = calibrate_cutoffs(std::vector<Structure>{s, s, s});
  CHECK(zero.structure == 0.0);
  CHECK(zero.composition == 0.0);

  const auto five = toy::slabs(5, 42);
  std::vector<FingerprintPair> fps;
  for (const auto& x : five) fps.push_back(fingerprints(x));
  double ss = 0, cs = 0;
  for (const auto& a : fps) {
    for (const auto& b : fps) {
      ss += euclid(a.structure_fp, b.structure_fp);
      cs += euclid(a.composition_fp, b.composition_fp);
    }
  }
  const auto cut = calibrate_cutoffs(five);
  CHECK(cut.structure == doctest::Approx(2.0 / 3.0 * ss / 25.0).epsilon(1e-12));
  CHECK(cut.composition == doctest::Approx(2.0 / 3.0 * cs / 25.0).epsilon(1e-12));

  std::vector<Structure> doubled = five;
  doubled.insert(doubled.end(), five.begin(), five.end());
  const auto cut2 = calibrate_cutoffs(doubled);
  CHECK(cut2.structure == doctest::Approx(cut.structure).epsilon(1e-12));
  CHECK(cut2.composition == doctest::Approx(cut.composition).epsilon(1e-12));
  CHECK(code_of([&] { calibrate_cutoffs(std::vector<Structure>{s}); }) == Errc::EmptyInput);
}

TEST_CASE("coverage") {
  const auto set = toy::slabs(10, 3);
  const auto self = coverage(set, set, {1e-6, 1e-6});
  CHECK(self.recall == 1.0);
  CHECK(self.precision == 1.0);

  std::vector<FingerprintPair> gt = {{constant_fp(0), constant_fp(0)}, {constant_fp(1), constant_fp(1)}};
  std::vector<FingerprintPair> far = {{constant_fp(100), constant_fp(100)}};
  const auto f = coverage(far, gt, {1.0, 1.0});
  CHECK(f.recall == 0.0);
  CHECK(f.precision == 0.0);

  // 3 generated vs 2 reference; sqrt(32)*0.1 ≈ 0.566 per 0.1 step along all 32 axes.
  std::vector<FingerprintPair> gen = {
      {constant_fp(0.1), constant_fp(0.0)},  // near gt[0] in both
      {constant_fp(1.0), constant_fp(3.0)},  // structure near gt[1], composition far
      {constant_fp(5.0), constant_fp(5.0)},  // far from everything
  };
  const auto r = coverage(gen, gt, {0.6, 0.6});
  CHECK(r.recall == doctest::Approx(0.5));
  CHECK(r.precision == doctest::Approx(1.0 / 3.0));
  CHECK(code_of([&] { coverage(std::vector<FingerprintPair>{}, gt, {1, 1}); }) == Errc::EmptyInput);
}

TEST_CASE("emd1d") {
  const std::vector<double> zeros{0, 0}, ones{1, 1}, a{0, 1}, b{1, 2};
  CHECK(emd1d(zeros, zeros) == 0.0);
  CHECK(emd1d(zeros, ones) == doctest::Approx(1.0));
  CHECK(emd1d(a, b) == doctest::Approx(1.0));
  CHECK(emd1d(std::vector<double>{0}, std::vector<double>{0, 2}) == doctest::Approx(1.0));
  CHECK(code_of([&] { emd1d(std::vector<double>{}, a); }) == Errc::EmptyInput);

  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.below(30);
    std::vector<double> x(n), y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal(0.5, 2.0);
      z[i] = std::floor(rng.uniform(0, 5));
    }
    const double xy = emd1d(x, y);
    CHECK(xy == doctest::Approx(sorted_matching(x, y)).epsilon(1e-12));
    CHECK(xy == doctest::Approx(emd1d(y, x)).epsilon(1e-12));
    CHECK(emd1d(x, z) <= xy + emd1d(y, z) + 1e-12);
    std::vector<double> shuffled = x;
    rng.shuffle(std::span(shuffled));
    CHECK(emd1d(x, shuffled) == 0.0);
  }
}

TEST_CASE("property EMD") {
  const auto gt = toy::slabs(20, 6);
  const auto same = property_emd(gt, gt);
  CHECK(same.emd_density == 0.0);
  CHECK(same.emd_nel == 0.0);

  std::vector<Structure> scaled = gt;
  double mean_rho = 0;
  for (auto& s : scaled) {
    mean_rho += density(s) / static_cast<double>(gt.size());
    s = corrupt_scale_with_factor(s, 2.0);
  }
  CHECK(property_emd(scaled, gt).emd_density == doctest::Approx(7.0 / 8.0 * mean_rho).epsilon(1e-9));

  std::vector<Structure> pure, binary;
  for (int i = 0; i < 5; ++i) {
    pure.push_back(toy::cubic(5 + i, {{"Pt", {0, 0, 0}}, {"Pt", {0.5, 0.5, 0.5}}}));
    binary.push_back(toy::cubic(5 + i, {{"Pt", {0, 0, 0}}, {"Au", {0.5, 0.5, 0.5}}}));
  }
  CHECK(property_emd(pure, binary).emd_nel == doctest::Approx(1.0));
}

TEST_CASE("structure matching") {
  const auto set = toy::slabs(30, 8);
  Rng rng(5);
  for (const auto& s : set) {
    CHECK(structures_match(s, s));
    CHECK(structures_match(s, augment_translate(s, rng)));
    CHECK(structures_match(augment_translate(s, rng), s));
  }
  Structure a = toy::cubic(10, {{"Pt", {0, 0, 0}}, {"Pt", {0.5, 0.5, 0.5}}});
  Structure b = toy::cubic(10, {{"Pt", {0, 0, 0}}, {"Au", {0.5, 0.5, 0.5}}});
  CHECK_FALSE(structures_match(a, b));
  Structure stretched = a;
  stretched.lattice.a = 13;
  CHECK_FALSE(structures_match(a, stretched));
  Structure tilted = a;
  tilted.lattice.gamma = 96;
  CHECK_FALSE(structures_match(a, tilted));
  Structure jiggled = a;
  jiggled.sites[1].frac.x += 0.01;
  CHECK(structures_match(a, jiggled));
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = 0; j < set.size(); ++j) {
      CHECK(structures_match(set[i], set[j]) == structures_match(set[j], set[i]));
    }
  }
}

TEST_CASE("uniqueness and novelty") {
  const Structure s = toy::slabs(1, 2)[0];
  CHECK(uniqueness(std::vector<Structure>(10, s)) == doctest::Approx(0.1));

  std::vector<Structure> distinct;
  for (int i = 0; i < 6; ++i) distinct.push_back(toy::cubic(4 * std::pow(1.5, i), {{"Pt", {0, 0, 0}}}));
  CHECK(uniqueness(distinct) == 1.0);

  // Five items, two duplicate pairs: {0,1}, {2,3}, {4}.
  Rng rng(6);
  const std::vector<Structure> five = {distinct[0], augment_translate(distinct[0], rng), distinct[2],
                                       augment_translate(distinct[2], rng), distinct[4]};
  std::size_t classes = 0;
  for (std::size_t i = 0; i < five.size(); ++i) {
    bool dup = false;
    for (std::size_t j = 0; j < i; ++j) dup = dup || structures_match(five[i], five[j]);
    classes += !dup;
  }
  CHECK(classes == 3);
  CHECK(uniqueness(five) == doctest::Approx(0.6));

  CHECK(novelty({distinct[1], distinct[2]}, distinct) == 0.0);
  const std::vector<Structure> other = {toy::cubic(5, {{"Au", {0, 0, 0}}})};
  CHECK(novelty(other, distinct) == 1.0);
  CHECK(code_of([&] { uniqueness({}); }) == Errc::EmptyInput);
  CHECK(code_of([&] { novelty({}, distinct); }) == Errc::EmptyInput);
}

TEST_CASE("composition rule") {
  const RoleConfig rc{{el("Ti")}, {el("Au")}, {el("O")}, 1.2, 2.6};
  Structure good = with_adsorbate({{"Au", {0, 0, 0.5}}, {"Ti", {0.5, 0.5, 0.5}}}, {0.5, 0.5, 0.6});
  CHECK(composition_validity(good, rc));
  CHECK_FALSE(composition_validity(with_adsorbate({{"Au", {0, 0, 0.5}}}, {0, 0, 0.6}), rc));
  CHECK_FALSE(composition_validity(toy::cubic(5, {{"Ti", {0, 0, 0}}, {"V", {0.5, 0.5, 0.5}}}), rc));
  CHECK_FALSE(composition_validity(
      with_adsorbate({{"Au", {0, 0, 0.5}}, {"Ti", {0.5, 0.5, 0.5}}, {"Pt", {0.5, 0, 0.5}}}, {0.5, 0.5, 0.6}), rc));

  RoleConfig bad = rc;
  bad.oxophobic.insert(el("Ti"));
  CHECK(code_of([&] { validate(bad); }) == Errc::BadConfig);
  const RoleConfig def = RoleConfig::defaults();
  for (const char* s : {"Ti", "V", "Nb", "Ta", "Mo", "W"}) CHECK(def.oxophilic.contains(el(s)));
  for (const char* s : {"Au", "Ag", "Cu", "Pd", "Pt", "Zn"}) CHECK(def.oxophobic.contains(el(s)));
  CHECK(def.adsorbates == std::set<Element>{el("O")});
}

TEST_CASE("adsorption rule") {
  const RoleConfig rc = RoleConfig::defaults();
  // O 2.0 Å above Ti; next host 2.8 Å away.
  const Structure ontop =
      with_adsorbate({{"Ti", {0.5, 0.5, 0.5}}, {"Au", {0.5 + std::sqrt(2.8 * 2.8 - 4.0) / 10.0, 0.5, 0.5}}},
                     {0.5, 0.5, 0.6});
  CHECK(adsorption_validity(ontop, rc));
  const Structure on_au = with_adsorbate({{"Au", {0.5, 0.5, 0.5}}, {"Ti", {0.1, 0.1, 0.5}}}, {0.5, 0.5, 0.6});
  CHECK_FALSE(adsorption_validity(on_au, rc));

  // Bridge: two Ti at 2.0 and 2.05 Å from O.
  const double h = 1.5;
  const double x1 = std::sqrt(4.0 - h * h), x2 = std::sqrt(2.05 * 2.05 - h * h);
  const Structure bridge = with_adsorbate({{"Ti", {0.5 - x1 / 10, 0.5, 0.5}}, {"Ti", {0.5 + x2 / 10, 0.5, 0.5}}},
                                          {0.5, 0.5, 0.5 + h / 20});
  CHECK_FALSE(adsorption_validity(bridge, rc));

  const Structure too_far = with_adsorbate({{"Ti", {0.5, 0.5, 0.5}}}, {0.5, 0.5, 0.65});
  CHECK_FALSE(adsorption_validity(too_far, rc));
  CHECK(code_of([&] { adsorption_validity(toy::cubic(5, {{"Ti", {0, 0, 0}}}), rc); }) == Errc::NoAdsorbate);

  // A lone Ti in a small cell: its own periodic images are the second neighbours.
  Structure small;
  small.lattice = {2.5, 2.5, 20, 90, 90, 90};
  small.sites = {{el("Ti"), {0, 0, 0.5}, SiteTag::Surface}, {el("O"), {0, 0, 0.6}, SiteTag::Adsorbate}};
  CHECK(adsorption_validity(small, rc));  // d2 = sqrt(2^2 + 2.5^2) ≈ 3.2, ratio 1.6
  small.lattice.a = small.lattice.b = 1.0;
  CHECK_FALSE(adsorption_validity(small, rc));  // d2 = sqrt(5), ratio 1.118
}

TEST_CASE("screening") {
  const std::vector<ScreeningRecord> recs = {
      {"a", 4.3, 3.8, ""}, {"b", 3.0, 4.0, ""}, {"c", 4.22, 3.0, ""}, {"d", 5.0, 3.6, ""}, {"e", 4.02, 3.53, ""}};
  const auto r = screen(recs);
  REQUIRE(r.passed.size() == 3);
  CHECK(r.passed[0].id == "a");
  CHECK(r.passed[1].id == "d");
  CHECK(r.passed[2].id == "e");
  REQUIRE(r.near_optimal.size() == 2);
  CHECK(r.near_optimal[0].id == "a");
  CHECK(r.near_optimal[1].id == "e");
  CHECK(screen({}).passed.empty());

  const auto path = std::filesystem::temp_directory_path() / "catgen_screen.jsonl";
  {
    std::ofstream out(path);
    out << R"({"id":"x","dG_OOH":4.1,"dG_O":3.9,"source":"mlp"})" << "\n\n" << R"({"id":"y","dG_OOH":"bad"})" << "\n";
  }
  try {
    read_screening_records(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  {
    std::ofstream out(path);
    out << R"({"id":"x","dG_OOH":4.1,"dG_O":3.9,"source":"mlp"})" << "\n";
  }
  const auto back = read_screening_records(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0] == ScreeningRecord{"x", 4.1, 3.9, "mlp"});
}

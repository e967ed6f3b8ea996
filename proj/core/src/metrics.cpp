// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "catgen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include <json.hpp>

#include "catgen/error.hpp"

namespace catgen {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<FingerprintPair> all_fingerprints(const std::vector<Structure>& structs) {
  std::vector<FingerprintPair> out;
  out.reserve(structs.size());
  for (const auto& s : structs) out.push_back(fingerprints(s));
  return out;
}

std::map<Element, std::size_t> composition(const Structure& s) {
  std::map<Element, std::size_t> counts;
  for (const auto& site : s.sites) ++counts[site.element];
  return counts;
}

bool lattices_close(const Lattice& a, const Lattice& b, const MatchTolerance& tol) {
  const double la[3] = {a.a, a.b, a.c};
  const double lb[3] = {b.a, b.b, b.c};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(la[i] - lb[i]) > tol.length_rtol * 0.5 * (la[i] + lb[i])) return false;
  }
  const double aa[3] = {a.alpha, a.beta, a.gamma};
  const double ab[3] = {b.alpha, b.beta, b.gamma};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(aa[i] - ab[i]) > tol.angle_atol) return false;
  }
  return true;
}

// Greedy site matching of `a` shifted onto `b`, anchored on each same-element
// site of `b`. Distances use the averaged lattice.
bool match_directed(const Structure& a, const Structure& b, const Mat3& cell, double threshold) {
  const auto counts = composition(a);
  // Anchor on the rarest element (lowest Z among ties) to keep the
  // candidate list short.
  Element anchor_el = counts.begin()->first;
  std::size_t best = counts.begin()->second;
  for (const auto& [el, n] : counts) {
    if (n < best) {
      best = n;
      anchor_el = el;
    }
  }
  std::size_t anchor = 0;
  while (a.sites[anchor].element != anchor_el) ++anchor;

  const std::size_t n = a.sites.size();
  std::vector<bool> used(n);
  for (const auto& target : b.sites) {
    if (target.element != anchor_el) continue;
    const FracCoord shift{target.frac.x - a.sites[anchor].frac.x, target.frac.y - a.sites[anchor].frac.y,
                          target.frac.z - a.sites[anchor].frac.z};
    std::fill(used.begin(), used.end(), false);
    double total = 0.0;
    bool complete = true;
    for (const auto& site : a.sites) {
      const FracCoord moved = wrapped(site.frac.x + shift.x, site.frac.y + shift.y, site.frac.z + shift.z);
      double nearest = kInf;
      std::size_t pick = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (used[j] || b.sites[j].element != site.element) continue;
        const double d = min_image_distance(cell, moved, b.sites[j].frac);
        if (d < nearest) {
          nearest = d;
          pick = j;
        }
      }
      if (pick == n) {
        complete = false;
        break;
      }
      used[pick] = true;
      total += nearest;
      if (total > threshold * static_cast<double>(n)) {
        complete = false;
        break;
      }
    }
    if (complete && total / static_cast<double>(n) <= threshold) return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------- validity

double min_pair_distance(const Structure& s) {
  if (s.sites.size() < 2) return kInf;
  const Mat3 cell = cell_matrix(s.lattice);
  double best = kInf;
  for (std::size_t i = 0; i < s.sites.size(); ++i) {
    for (std::size_t j = i + 1; j < s.sites.size(); ++j) {
      best = std::min(best, min_image_distance(cell, s.sites[i].frac, s.sites[j].frac));
    }
  }
  return best;
}

bool structural_validity(const Structure& s) {
  try {
    if (cell_volume(s.lattice) < kMinCellVolume) return false;
    return min_pair_distance(s) >= kMinAtomDistance;
  } catch (const Error& e) {
    if (e.code() == Errc::DegenerateCell) return false;
    throw;
  }
}

double catalyst_validity(const DetectorModel& detector, const std::vector<TokenSeq>& seqs) {
  if (seqs.empty()) throw Error(Errc::EmptyInput, "catalyst validity of an empty set");
  std::size_t valid = 0;
  for (const auto& seq : seqs) {
    try {
      if (detector_score(detector, seq) >= kDetectorThreshold) ++valid;
    } catch (const Error&) {
      // Unscorable sequences count as invalid.
    }
  }
  return static_cast<double>(valid) / static_cast<double>(seqs.size());
}

// ------------------------------------------------------------ fingerprints

Fingerprint composition_fp(const Structure& s) {
  if (s.sites.empty()) throw Error(Errc::EmptyInput, "composition fingerprint of an empty structure");
  std::map<Element, std::size_t> counts;
  for (const auto& site : s.sites) {
    if (site.tag != SiteTag::Adsorbate) ++counts[site.element];
  }
  if (counts.empty()) counts = composition(s);
  std::size_t total = 0;
  for (const auto& [el, n] : counts) total += n;

  Fingerprint fp{};
  for (std::size_t p = 0; p < kNumElementProperties; ++p) {
    double mean = 0.0;
    double lo = kInf;
    double hi = -kInf;
    for (const auto& [el, n] : counts) {
      const double v = numeric_properties(element_properties(el))[p];
      mean += v * static_cast<double>(n) / static_cast<double>(total);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    fp[4 * p + 0] = mean;
    fp[4 * p + 1] = lo;
    fp[4 * p + 2] = hi;
    fp[4 * p + 3] = hi - lo;
  }
  return fp;
}

Fingerprint structure_fp(const Structure& s) {
  if (s.sites.empty()) throw Error(Errc::EmptyInput, "structure fingerprint of an empty structure");
  const Mat3 cell = cell_matrix(s.lattice);
  const std::size_t n = s.sites.size();
  Fingerprint fp{};
  std::vector<double> counts(n, 0.0);
  std::array<double, kHistogramBins> hist{};
  for (std::size_t i = 0; i < n; ++i) {
    hist.fill(0.0);
    std::size_t neighbors = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = min_image_distance(cell, s.sites[i].frac, s.sites[j].frac);
      if (d >= kNeighborCutoff) continue;
      const auto bin = std::min(kHistogramBins - 1, static_cast<std::size_t>(d / kHistogramBin));
      hist[bin] += 1.0;
      ++neighbors;
    }
    counts[i] = static_cast<double>(neighbors);
    if (neighbors == 0) continue;
    for (std::size_t b = 0; b < kHistogramBins; ++b) fp[b] += hist[b] / static_cast<double>(neighbors);
  }
  for (std::size_t b = 0; b < kHistogramBins; ++b) fp[b] /= static_cast<double>(n);
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean);
  fp[kHistogramBins] = mean;
  fp[kHistogramBins + 1] = std::sqrt(var / static_cast<double>(n));
  return fp;
}

FingerprintPair fingerprints(const Structure& s) { return {structure_fp(s), composition_fp(s)}; }

double fp_distance(const Fingerprint& a, const Fingerprint& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < kFingerprintSize; ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sq);
}

// ---------------------------------------------------------------- coverage

CoverageCutoffs calibrate_cutoffs(const std::vector<FingerprintPair>& reference) {
  const std::size_t n = reference.size();
  if (n < 2) throw Error(Errc::EmptyInput, "cutoff calibration needs at least 2 structures");
  double s_sum = 0.0;
  double c_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      s_sum += 2.0 * fp_distance(reference[i].structure_fp, reference[j].structure_fp);
      c_sum += 2.0 * fp_distance(reference[i].composition_fp, reference[j].composition_fp);
    }
  }
  const double cells = static_cast<double>(n) * static_cast<double>(n);
  return {2.0 / 3.0 * s_sum / cells, 2.0 / 3.0 * c_sum / cells};
}

CoverageCutoffs calibrate_cutoffs(const std::vector<Structure>& reference) {
  if (reference.size() < 2) throw Error(Errc::EmptyInput, "cutoff calibration needs at least 2 structures");
  return calibrate_cutoffs(all_fingerprints(reference));
}

CoverageReport coverage(const std::vector<FingerprintPair>& gen, const std::vector<FingerprintPair>& gt,
                        CoverageCutoffs cutoffs) {
  if (gen.empty() || gt.empty()) throw Error(Errc::EmptyInput, "coverage needs non-empty generated and reference sets");
  auto covered = [&](const FingerprintPair& x, const std::vector<FingerprintPair>& others) {
    return std::any_of(others.begin(), others.end(), [&](const FingerprintPair& y) {
      return fp_distance(x.structure_fp, y.structure_fp) <= cutoffs.structure &&
             fp_distance(x.composition_fp, y.composition_fp) <= cutoffs.composition;
    });
  };
  const auto recall_hits = std::count_if(gt.begin(), gt.end(), [&](const auto& x) { return covered(x, gen); });
  const auto precision_hits = std::count_if(gen.begin(), gen.end(), [&](const auto& x) { return covered(x, gt); });
  return {static_cast<double>(recall_hits) / static_cast<double>(gt.size()),
          static_cast<double>(precision_hits) / static_cast<double>(gen.size()), cutoffs};
}

CoverageReport coverage(const std::vector<Structure>& gen, const std::vector<Structure>& gt, CoverageCutoffs cutoffs) {
  if (gen.empty() || gt.empty()) throw Error(Errc::EmptyInput, "coverage needs non-empty generated and reference sets");
  return coverage(all_fingerprints(gen), all_fingerprints(gt), cutoffs);
}

// ------------------------------------------------------- property distance

double emd1d(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw Error(Errc::EmptyInput, "EMD needs non-empty samples");
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  // Sweep the merged support; between consecutive support points both CDFs
  // are constant.
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(a.front(), b.front());
  double total = 0.0;
  while (i < a.size() || j < b.size()) {
    double next;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j])) {
      next = a[i];
    } else {
      next = b[j];
    }
    const double fa = static_cast<double>(i) / na;
    const double fb = static_cast<double>(j) / nb;
    total += std::abs(fa - fb) * (next - prev);
    while (i < a.size() && a[i] == next) ++i;
    while (j < b.size() && b[j] == next) ++j;
    prev = next;
  }
  return total;
}

std::size_t unique_element_count(const Structure& s) { return composition(s).size(); }

PropertyReport property_emd(const std::vector<Structure>& gen, const std::vector<Structure>& gt) {
  if (gen.empty() || gt.empty()) throw Error(Errc::EmptyInput, "property EMD needs non-empty sets");
  auto collect = [](const std::vector<Structure>& set, std::vector<double>& rho, std::vector<double>& nel) {
    for (const auto& s : set) {
      rho.push_back(density(s));
      nel.push_back(static_cast<double>(unique_element_count(s)));
    }
  };
  std::vector<double> rho_gen, nel_gen, rho_gt, nel_gt;
  collect(gen, rho_gen, nel_gen);
  collect(gt, rho_gt, nel_gt);
  return {emd1d(rho_gen, rho_gt), emd1d(nel_gen, nel_gt)};
}

// --------------------------------------------------------------- diversity

bool structures_match(const Structure& a, const Structure& b, const MatchTolerance& tol) {
  if (a.sites.size() != b.sites.size()) return false;
  if (a.sites.empty()) return lattices_close(a.lattice, b.lattice, tol);
  if (composition(a) != composition(b)) return false;
  if (!lattices_close(a.lattice, b.lattice, tol)) return false;
  const Lattice avg{0.5 * (a.lattice.a + b.lattice.a),         0.5 * (a.lattice.b + b.lattice.b),
                    0.5 * (a.lattice.c + b.lattice.c),         0.5 * (a.lattice.alpha + b.lattice.alpha),
                    0.5 * (a.lattice.beta + b.lattice.beta),   0.5 * (a.lattice.gamma + b.lattice.gamma)};
  Mat3 cell;
  double volume;
  try {
    cell = cell_matrix(avg);
    volume = 0.5 * (cell_volume(a.lattice) + cell_volume(b.lattice));
  } catch (const Error&) {
    return false;
  }
  const double threshold = tol.site_tol * std::cbrt(volume / static_cast<double>(a.sites.size()));
  return match_directed(a, b, cell, threshold) || match_directed(b, a, cell, threshold);
}

std::size_t count_unique(const std::vector<Structure>& valid_gen, const MatchTolerance& tol) {
  std::vector<const Structure*> reps;
  for (const auto& s : valid_gen) {
    const bool seen = std::any_of(reps.begin(), reps.end(), [&](const Structure* r) { return structures_match(*r, s, tol); });
    if (!seen) reps.push_back(&s);
  }
  return reps.size();
}

double uniqueness(const std::vector<Structure>& valid_gen, const MatchTolerance& tol) {
  if (valid_gen.empty()) throw Error(Errc::EmptyInput, "uniqueness of an empty set");
  return static_cast<double>(count_unique(valid_gen, tol)) / static_cast<double>(valid_gen.size());
}

std::size_t count_novel(const std::vector<Structure>& valid_gen, const std::vector<Structure>& train,
                        const MatchTolerance& tol) {
  return static_cast<std::size_t>(std::count_if(valid_gen.begin(), valid_gen.end(), [&](const Structure& s) {
    return std::none_of(train.begin(), train.end(), [&](const Structure& t) { return structures_match(s, t, tol); });
  }));
}

double novelty(const std::vector<Structure>& valid_gen, const std::vector<Structure>& train, const MatchTolerance& tol) {
  if (valid_gen.empty()) throw Error(Errc::EmptyInput, "novelty of an empty set");
  return static_cast<double>(count_novel(valid_gen, train, tol)) / static_cast<double>(valid_gen.size());
}

// ---------------------------------------------------------- 2e-ORR rules

RoleConfig RoleConfig::defaults() {
  RoleConfig rc;
  for (const char* s : {"Ti", "V", "Nb", "Ta", "Mo", "W"}) rc.oxophilic.insert(Element::from_symbol(s));
  for (const char* s : {"Au", "Ag", "Cu", "Pd", "Pt", "Zn"}) rc.oxophobic.insert(Element::from_symbol(s));
  rc.adsorbates.insert(Element::from_symbol("O"));
  return rc;
}

void validate(const RoleConfig& rc) {
  for (Element e : rc.oxophilic) {
    if (rc.oxophobic.contains(e)) {
      throw Error(Errc::BadConfig, std::string(e.symbol()) + " is both oxophilic and oxophobic");
    }
  }
  if (!(rc.ontop_ratio > 0.0) || !(rc.bond_cutoff > 0.0)) throw Error(Errc::BadConfig, "role thresholds must be positive");
}

bool composition_validity(const Structure& s, const RoleConfig& rc) {
  std::set<Element> host;
  for (const auto& site : s.sites) {
    if (site.tag != SiteTag::Adsorbate) host.insert(site.element);
  }
  if (host.size() != 2) return false;
  const Element x = *host.begin();
  const Element y = *std::next(host.begin());
  return (rc.oxophilic.contains(x) && rc.oxophobic.contains(y)) ||
         (rc.oxophilic.contains(y) && rc.oxophobic.contains(x));
}

bool adsorption_validity(const Structure& s, const RoleConfig& rc) {
  const Mat3 cell = cell_matrix(s.lattice);
  bool any = false;
  for (const auto& ads : s.sites) {
    if (ads.tag != SiteTag::Adsorbate || !rc.adsorbates.contains(ads.element)) continue;
    any = true;
    // Two nearest host neighbours, periodic images included, so a lone surface
    // atom and its own image count as two neighbours.
    double d1 = kInf;
    double d2 = kInf;
    const Site* nearest = nullptr;
    for (const auto& host : s.sites) {
      if (host.tag == SiteTag::Adsorbate) continue;
      const Vec3 delta = to_vec(host.frac) - to_vec(ads.frac);
      const Vec3 base(delta.x() - std::round(delta.x()), delta.y() - std::round(delta.y()),
                      delta.z() - std::round(delta.z()));
      for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
          for (int k = -1; k <= 1; ++k) {
            const double d = (cell.transpose() * (base + Vec3(i, j, k))).norm();
            if (d < d1) {
              d2 = d1;
              d1 = d;
              nearest = &host;
            } else if (d < d2) {
              d2 = d;
            }
          }
        }
      }
    }
    if (nearest == nullptr || !rc.oxophilic.contains(nearest->element)) return false;
    if (!(d1 > 0.0) || d1 > rc.bond_cutoff) return false;
    if (d2 / d1 < rc.ontop_ratio) return false;
  }
  if (!any) throw Error(Errc::NoAdsorbate, "structure has no reaction adsorbate");
  return true;
}

// ---------------------------------------------------------------- screening

ScreeningResult screen(const std::vector<ScreeningRecord>& records) {
  ScreeningResult out;
  for (const auto& r : records) {
    if (!std::isfinite(r.dG_OOH) || !std::isfinite(r.dG_O)) {
      throw Error(Errc::OutOfRange, "non-finite energy in record '" + r.id + "'");
    }
    const bool active = r.dG_OOH > kActivityLow && r.dG_OOH < kActivityHigh;
    const bool selective = r.dG_O > kSelectivityMin;
    if (!(active && selective)) continue;
    out.passed.push_back(r);
    // 1e-9 eV slack keeps the inclusive band edges (4.02, 4.42) inside
    // despite binary rounding.
    if (std::abs(r.dG_OOH - kOptimalOOH) <= kOptimalBand + 1e-9) out.near_optimal.push_back(r);
  }
  return out;
}

std::vector<ScreeningRecord> read_screening_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<ScreeningRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    if (!j.is_object()) throw ParseError(line_no, "record is not a JSON object");
    ScreeningRecord r;
    auto id = j.find("id");
    if (id == j.end()) throw ParseError(line_no, "missing 'id'");
    r.id = id->is_string() ? id->get<std::string>() : id->dump();
    for (auto [key, dest] : {std::pair{"dG_OOH", &r.dG_OOH}, std::pair{"dG_O", &r.dG_O}}) {
      auto it = j.find(key);
      if (it == j.end() || !it->is_number()) throw ParseError(line_no, std::string("missing or non-numeric '") + key + "'");
      *dest = it->get<double>();
    }
    if (auto src = j.find("source"); src != j.end() && src->is_string()) r.source = src->get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace catgen

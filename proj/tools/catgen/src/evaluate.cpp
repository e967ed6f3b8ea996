// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <numeric>

#include "catgen/cli.hpp"
#include "catgen/error.hpp"

namespace catgen::cli {
namespace {

bool catalyst_ok(const DetectorModel& d, const Structure& s) {
  try {
    return detector_score(d, encode(s)) >= kDetectorThreshold;
  } catch (const Error&) {
    return false;
  }
}

bool adsorption_ok(const Structure& s, const RoleConfig& rc) {
  try {
    return adsorption_validity(s, rc);
  } catch (const Error& e) {
    if (e.code() == Errc::NoAdsorbate) return false;
    throw;
  }
}

}  // namespace

Generated generate(const LanguageModel& m, const GenerateOptions& opts) {
  const std::size_t n = opts.lattices.empty() ? opts.n : opts.lattices.size();
  Generated out;
  out.tokens.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SampleParams p;
    p.temperature = opts.temperature;
    p.max_len = opts.max_len;
    p.seed = mix_seed(opts.seed, i);
    if (!opts.lattices.empty()) p.lattice_prompt = opts.lattices[i];
    SampleResult r = sample(m, p);
    out.tokens.push_back(std::move(r.tokens));
    out.truncated.push_back(r.truncated);
  }
  return out;
}

EvaluationReport evaluate(const EvalInputs& in) {
  if (in.gen == nullptr || in.gen->empty()) throw Error(Errc::EmptyInput, "no generated sequences to evaluate");
  if (in.gt == nullptr || in.gt->empty()) throw Error(Errc::EmptyInput, "no ground-truth structures to compare against");

  EvaluationReport rep;
  rep.temperature = in.temperature;
  rep.n_generated = in.gen->size();

  const BatchDecode decoded = batch_decode(*in.gen, in.bypass);
  const std::vector<Structure> valid_gen = decoded.structures();
  const std::size_t n_gen = valid_gen.size();
  rep.validity.generation = {n_gen, in.gen->size()};

  std::vector<bool> passes(n_gen, true);
  std::size_t n_struct = 0;
  for (std::size_t i = 0; i < n_gen; ++i) {
    const bool ok = structural_validity(valid_gen[i]);
    n_struct += ok;
    passes[i] = passes[i] && ok;
  }
  rep.validity.structural = {n_struct, n_gen};

  if (in.detector != nullptr) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n_gen; ++i) {
      const bool ok = catalyst_ok(*in.detector, valid_gen[i]);
      k += ok;
      passes[i] = passes[i] && ok;
    }
    rep.validity.catalyst = Ratio{k, n_gen};
  }

  if (in.roles != nullptr) {
    std::size_t kc = 0, ka = 0, kb = 0;
    for (std::size_t i = 0; i < n_gen; ++i) {
      const bool c = composition_validity(valid_gen[i], *in.roles);
      const bool a = adsorption_ok(valid_gen[i], *in.roles);
      kc += c;
      ka += a;
      kb += c && a;
      passes[i] = passes[i] && c && a;
    }
    rep.validity.composition = Ratio{kc, n_gen};
    rep.validity.adsorption = Ratio{ka, n_gen};
    rep.validity.orr = Ratio{kb, n_gen};
  }

  if (n_gen > 0) {
    CoverageCutoffs cut;
    if (!in.metrics.struct_cutoff || !in.metrics.comp_cutoff) cut = calibrate_cutoffs(*in.gt);
    if (in.metrics.struct_cutoff) cut.structure = *in.metrics.struct_cutoff;
    if (in.metrics.comp_cutoff) cut.composition = *in.metrics.comp_cutoff;
    rep.coverage = coverage(valid_gen, *in.gt, cut);
  }

  std::vector<Structure> fully_valid;
  for (std::size_t i = 0; i < n_gen; ++i) {
    if (passes[i]) fully_valid.push_back(valid_gen[i]);
  }
  rep.n_fully_valid = fully_valid.size();
  if (fully_valid.empty()) return rep;

  std::vector<std::size_t> idx(fully_valid.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (idx.size() > in.metrics.property_sample) {
    Rng rng(mix_seed(in.seed, 0x5eed));
    rng.shuffle(std::span(idx));
    idx.resize(in.metrics.property_sample);
    std::sort(idx.begin(), idx.end());
  }
  if (!idx.empty()) {
    std::vector<Structure> subset;
    for (std::size_t i : idx) subset.push_back(fully_valid[i]);
    rep.property = property_emd(subset, *in.gt);
  }

  if (in.train != nullptr && !in.train->empty()) {
    DiversityReport d;
    d.tolerance = in.metrics.tolerance;
    d.n_valid = fully_valid.size();
    d.n_unique = count_unique(fully_valid, d.tolerance);
    d.n_novel = count_novel(fully_valid, *in.train, d.tolerance);
    d.uniqueness = static_cast<double>(d.n_unique) / static_cast<double>(d.n_valid);
    d.novelty = static_cast<double>(d.n_novel) / static_cast<double>(d.n_valid);
    rep.diversity = d;
  }
  return rep;
}

}  // namespace catgen::cli

// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "catgen/codec.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "catgen/error.hpp"

namespace catgen {
namespace {

struct VocabIndex {
  std::unordered_map<std::string, TokenId> ids;
};

const VocabIndex& vocab_index() {
  static const VocabIndex index = [] {
    VocabIndex idx;
    const Vocabulary& v = build_vocab();
    for (std::size_t i = 0; i < v.size(); ++i) idx.ids.emplace(v.token(static_cast<TokenId>(i)), static_cast<TokenId>(i));
    return idx;
  }();
  return index;
}

double step_value(TokenId t) { return static_cast<double>(numeric_step(t)) / kNumericSteps; }

}  // namespace

const Vocabulary& build_vocab() {
  static const Vocabulary vocab = [] {
    Vocabulary v;
    v.tokens_.reserve(kVocabSize);
    v.tokens_.emplace_back("<bos>");
    v.tokens_.emplace_back("<eos>");
    v.tokens_.emplace_back("<pad>");
    for (const auto& rec : element_table()) v.tokens_.emplace_back(rec.symbol);
    char buf[8];
    for (int k = 0; k <= kNumericSteps; ++k) {
      std::snprintf(buf, sizeof buf, "%d.%03d", k / 1000, k % 1000);
      v.tokens_.emplace_back(buf);
    }
    return v;
  }();
  return vocab;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error(Errc::OutOfRange, "token id " + std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::id(std::string_view token) const {
  const auto& ids = vocab_index().ids;
  if (auto it = ids.find(std::string(token)); it != ids.end()) return it->second;
  return std::nullopt;
}

int quantize_step(double value, QuantizeContext ctx) {
  if (!(value >= 0.0 && value < 1.0 + 5e-4)) {
    throw Error(Errc::OutOfRange, "value " + std::to_string(value) + " outside [0, 1.0005)");
  }
  // The 1e-9 step slack makes decimal ties such as 0.0015 round up even when
  // their binary representation falls a hair below the midpoint.
  int step = static_cast<int>(std::floor(value * kNumericSteps + 0.5 + 1e-9));
  step = std::min(step, kNumericSteps);
  if (ctx == QuantizeContext::Coordinate && step == kNumericSteps) step = 0;
  return step;
}

TokenId quantize(double value, QuantizeContext ctx) { return numeric_token(quantize_step(value, ctx)); }

TokenSeq encode(const Structure& s) {
  validate_lattice(s.lattice);
  const Lattice& l = s.lattice;
  for (double len : {l.a, l.b, l.c}) {
    if (len > kLatticeScale) throw Error(Errc::LatticeTooLarge, "lattice length " + std::to_string(len) + " Å > 180 Å");
  }
  TokenSeq out;
  out.reserve(token_count(s.sites.size()));
  out.push_back(kBos);
  for (double v : {l.a, l.b, l.c, l.alpha, l.beta, l.gamma}) out.push_back(quantize(v / kLatticeScale));
  for (const auto& site : s.sites) {
    out.push_back(element_token(site.element));
    out.push_back(quantize(site.frac.x, QuantizeContext::Coordinate));
    out.push_back(quantize(site.frac.y, QuantizeContext::Coordinate));
    out.push_back(quantize(site.frac.z, QuantizeContext::Coordinate));
  }
  out.push_back(kEos);
  return out;
}

std::string_view to_string(DecodeErrorKind kind) noexcept {
  switch (kind) {
    case DecodeErrorKind::MissingBos: return "MissingBos";
    case DecodeErrorKind::MissingEos: return "MissingEos";
    case DecodeErrorKind::TruncatedLattice: return "TruncatedLattice";
    case DecodeErrorKind::GrammarViolation: return "GrammarViolation";
    case DecodeErrorKind::NoAtoms: return "NoAtoms";
    case DecodeErrorKind::DegenerateCell: return "DegenerateCell";
  }
  return "Unknown";
}

DecodeResult decode(std::span<const TokenId> tokens, Bypass bypass) {
  using K = DecodeErrorKind;
  const std::size_t n = tokens.size();
  if (n == 0 || tokens[0] != kBos) return DecodeError{K::MissingBos, 0};

  // Lattice block: exactly six numeric tokens.
  double lat[6];
  std::size_t pos = 1;
  for (int i = 0; i < 6; ++i, ++pos) {
    if (pos >= n || tokens[pos] == kEos) return DecodeError{K::TruncatedLattice, pos};
    if (!is_numeric_token(tokens[pos])) return DecodeError{K::GrammarViolation, pos};
    lat[i] = step_value(tokens[pos]) * kLatticeScale;
  }
  Structure s;
  s.lattice = {lat[0], lat[1], lat[2], lat[3], lat[4], lat[5]};
  Mat3 cell;
  try {
    cell = cell_matrix(s.lattice);
  } catch (const Error&) {
    return DecodeError{K::DegenerateCell, 1};
  }

  // Atom groups until <eos>.
  std::vector<Site> atoms;
  for (;;) {
    if (pos >= n) return DecodeError{K::MissingEos, pos};
    const TokenId t = tokens[pos];
    if (t == kEos) break;
    if (!is_element_token(t)) return DecodeError{K::GrammarViolation, pos};
    double xyz[3];
    for (int c = 0; c < 3; ++c) {
      const std::size_t p = pos + 1 + static_cast<std::size_t>(c);
      if (p >= n) return DecodeError{K::MissingEos, p};
      if (!is_numeric_token(tokens[p])) return DecodeError{K::GrammarViolation, p};
      xyz[c] = step_value(tokens[p]);
    }
    atoms.push_back({token_element(t), wrapped(xyz[0], xyz[1], xyz[2]), SiteTag::Bulk});
    pos += 4;
  }
  const std::size_t eos_pos = pos;
  for (std::size_t p = eos_pos + 1; p < n; ++p) {
    if (tokens[p] != kPad) return DecodeError{K::GrammarViolation, p};
  }
  if (atoms.empty()) return DecodeError{K::NoAtoms, eos_pos};

  Decoded out;
  s.sites.reserve(atoms.size());
  for (const auto& atom : atoms) {
    if (bypass.enabled) {
      bool overlaps = false;
      for (const auto& kept : s.sites) {
        if (min_image_distance(cell, kept.frac, atom.frac) < bypass.min_dist) {
          overlaps = true;
          break;
        }
      }
      if (overlaps) {
        ++out.skipped;
        continue;
      }
    }
    s.sites.push_back(atom);
  }
  out.structure = assign_tags(std::move(s));
  return out;
}

std::vector<Structure> BatchDecode::structures() const {
  std::vector<Structure> out;
  for (const auto& item : items) {
    if (const auto* d = std::get_if<Decoded>(&item)) out.push_back(d->structure);
  }
  return out;
}

BatchDecode batch_decode(const std::vector<TokenSeq>& seqs, Bypass bypass) {
  BatchDecode out;
  out.items.reserve(seqs.size());
  for (const auto& seq : seqs) {
    out.items.push_back(decode(seq, bypass));
    if (std::holds_alternative<Decoded>(out.items.back())) ++out.n_valid;
  }
  out.generation_validity =
      seqs.empty() ? 0.0 : static_cast<double>(out.n_valid) / static_cast<double>(seqs.size());
  return out;
}

std::string to_token_string(std::span<const TokenId> tokens) {
  const Vocabulary& v = build_vocab();
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += v.token(tokens[i]);
  }
  return out;
}

TokenSeq parse_token_string(std::string_view line, std::size_t line_no) {
  const Vocabulary& v = build_vocab();
  TokenSeq out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) {
    auto id = v.id(tok);
    if (!id) throw ParseError(line_no, "unknown token '" + tok + "'");
    out.push_back(*id);
  }
  return out;
}

}  // namespace catgen

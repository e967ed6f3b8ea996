// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

// Structure <-> token sequence codec.
//
// A well-formed sequence is
//   <bos> a b c alpha beta gamma (El x y z)+ <eos>
// where lattice lengths and angles are divided by 180 and every number is a
// single 3-decimal token "0.000" .. "1.000".

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "catgen/structio.hpp"

namespace catgen {

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;

inline constexpr TokenId kBos = 0;
inline constexpr TokenId kEos = 1;
inline constexpr TokenId kPad = 2;
inline constexpr TokenId kFirstElementToken = 3;
inline constexpr TokenId kFirstNumericToken = kFirstElementToken + kNumElements;  // "0.000"
inline constexpr int kNumericSteps = 1000;                                         // "1.000" is step 1000
inline constexpr TokenId kVocabSize = kFirstNumericToken + kNumericSteps + 1;      // 1122
inline constexpr double kLatticeScale = 180.0;

constexpr bool is_element_token(TokenId t) noexcept {
  return t >= kFirstElementToken && t < kFirstNumericToken;
}
constexpr bool is_numeric_token(TokenId t) noexcept { return t >= kFirstNumericToken && t < kVocabSize; }
constexpr TokenId numeric_token(int step) noexcept { return kFirstNumericToken + step; }
constexpr int numeric_step(TokenId t) noexcept { return t - kFirstNumericToken; }
inline TokenId element_token(Element e) noexcept { return kFirstElementToken + e.z() - 1; }
inline Element token_element(TokenId t) { return Element(t - kFirstElementToken + 1); }

constexpr std::size_t token_count(std::size_t n_atoms) noexcept { return 2 + 6 + 4 * n_atoms; }

class Vocabulary {
 public:
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(TokenId id) const;
  std::optional<TokenId> id(std::string_view token) const;

 private:
  friend const Vocabulary& build_vocab();
  std::vector<std::string> tokens_;
};

// Process-wide immutable vocabulary: specials, 118 element symbols, then the
// numeric tokens in increasing order.
const Vocabulary& build_vocab();

enum class QuantizeContext { Lattice, Coordinate };

// Round-half-up to three decimals. Values are accepted in [0, 1 + 5e-4).
// In coordinate context step 1000 wraps to step 0. Throws OutOfRange.
int quantize_step(double value, QuantizeContext ctx);
TokenId quantize(double value, QuantizeContext ctx = QuantizeContext::Lattice);

// Emits sites in stored order; canonical order is the caller's business.
// Throws LatticeTooLarge (length > 180 Å), DegenerateCell.
TokenSeq encode(const Structure& s);

enum class DecodeErrorKind { MissingBos, MissingEos, TruncatedLattice, GrammarViolation, NoAtoms, DegenerateCell };

std::string_view to_string(DecodeErrorKind kind) noexcept;

struct DecodeError {
  DecodeErrorKind kind;
  std::size_t position;  // index of the offending token
};

struct Bypass {
  bool enabled = false;
  double min_dist = 0.5;  // Å

  static Bypass off() { return {}; }
  static Bypass on(double min_dist = 0.5) { return {true, min_dist}; }
};

struct Decoded {
  Structure structure;
  std::size_t skipped = 0;  // atoms dropped by bypass
};

using DecodeResult = std::variant<Decoded, DecodeError>;

// Parses the grammar, materializes atoms left to right and tags them with
// assign_tags. With bypass enabled an atom closer than min_dist to any
// already accepted atom is dropped; the sequence itself is not altered.
// Trailing <pad> tokens after <eos> are accepted.
DecodeResult decode(std::span<const TokenId> tokens, Bypass bypass = Bypass::off());

struct BatchDecode {
  std::vector<DecodeResult> items;
  std::size_t n_valid = 0;
  double generation_validity = 0.0;  // n_valid / items.size(), 0 for an empty batch

  std::vector<Structure> structures() const;
};

BatchDecode batch_decode(const std::vector<TokenSeq>& seqs, Bypass bypass = Bypass::off());

// Whitespace-separated token strings, e.g. "<bos> 0.100 ... <eos>".
std::string to_token_string(std::span<const TokenId> tokens);
// Throws ParseError(line_no) on an unknown token string.
TokenSeq parse_token_string(std::string_view line, std::size_t line_no = 1);

}  // namespace catgen

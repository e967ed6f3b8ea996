// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace catgen {

enum class Errc {
  DegenerateCell,
  UnknownElement,
  ParseError,
  IoError,
  BadRatios,
  LatticeTooLarge,
  OutOfRange,
  TooFewAtoms,
  BadConfig,
  SequenceTooLong,
  NonFiniteLoss,
  ConfigMismatch,
  EmptyInput,
  NoAdsorbate,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type for the library; `code()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Line-numbered parse failure (1-based line numbers).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason);

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

}  // namespace catgen

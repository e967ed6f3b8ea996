// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "catgen/error.hpp"

namespace catgen {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DegenerateCell: return "DegenerateCell";
    case Errc::UnknownElement: return "UnknownElement";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
    case Errc::BadRatios: return "BadRatios";
    case Errc::LatticeTooLarge: return "LatticeTooLarge";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::TooFewAtoms: return "TooFewAtoms";
    case Errc::BadConfig: return "BadConfig";
    case Errc::SequenceTooLong: return "SequenceTooLong";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::ConfigMismatch: return "ConfigMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::NoAdsorbate: return "NoAdsorbate";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

ParseError::ParseError(std::size_t line, const std::string& reason)
    : Error(Errc::ParseError, "line " + std::to_string(line) + ": " + reason),
      line_(line),
      reason_(reason) {}

}  // namespace catgen

// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "catgen/neural.hpp"

namespace catgen::detail {

void check_length(const LMConfig& cfg, std::size_t n);
void check_tokens(const LMConfig& cfg, std::span<const TokenId> tokens);
std::span<const TokenId> strip_padding(std::span<const TokenId> tokens);

}  // namespace catgen::detail

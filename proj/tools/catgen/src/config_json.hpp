// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "catgen/cli.hpp"

namespace catgen::cli {

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_json(const RunConfig& c);
std::string sha256_hex(const std::string& data);

}  // namespace catgen::cli

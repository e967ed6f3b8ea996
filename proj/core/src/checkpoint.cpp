// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "catgen/error.hpp"
#include "catgen/neural.hpp"

namespace catgen {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr const char* kFormat = "catgen-checkpoint";
constexpr int kVersion = 1;

nlohmann::ordered_json config_json(const LMConfig& c) {
  nlohmann::ordered_json j;
  j["n_layers"] = c.n_layers;
  j["n_heads"] = c.n_heads;
  j["d_model"] = c.d_model;
  j["d_ff"] = c.d_ff;
  j["context_len"] = c.context_len;
  j["vocab_size"] = c.vocab_size;
  j["dropout"] = c.dropout;
  j["seed"] = c.seed;
  return j;
}

LMConfig config_from(const nlohmann::json& j) {
  LMConfig c;
  c.n_layers = j.at("n_layers").get<int>();
  c.n_heads = j.at("n_heads").get<int>();
  c.d_model = j.at("d_model").get<int>();
  c.d_ff = j.at("d_ff").get<int>();
  c.context_len = j.at("context_len").get<int>();
  c.vocab_size = j.at("vocab_size").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

void save(const LMConfig& cfg, const char* kind, const std::vector<TensorInfo>& tensors,
          const Weights& weights, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
  nlohmann::ordered_json manifest;
  manifest["format"] = kFormat;
  manifest["version"] = kVersion;
  manifest["kind"] = kind;
  manifest["config"] = config_json(cfg);
  auto list = nlohmann::ordered_json::array();
  for (const auto& t : tensors) {
    const std::string file = t.name + ".bin";
    std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + (dir / file).string());
    out.write(reinterpret_cast<const char*>(weights.data() + t.offset),
              static_cast<std::streamsize>(t.size * sizeof(float)));
    if (!out) throw Error(Errc::IoError, "write failed for " + (dir / file).string());
    list.push_back({{"name", t.name}, {"shape", t.shape}, {"file", file}});
  }
  manifest["tensors"] = std::move(list);
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

std::pair<LMConfig, Weights> load(const std::filesystem::path& dir, const char* kind, ModelKind mk,
                                             std::vector<TensorInfo>& tensors) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(Errc::IoError, "no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigMismatch, std::string("unreadable manifest: ") + e.what());
  }
  try {
    if (manifest.at("format").get<std::string>() != kFormat || manifest.at("version").get<int>() != kVersion) {
      throw Error(Errc::ConfigMismatch, "unsupported checkpoint format");
    }
    if (manifest.at("kind").get<std::string>() != kind) {
      throw Error(Errc::ConfigMismatch, "checkpoint holds a " + manifest.at("kind").get<std::string>() +
                                            ", expected " + kind);
    }
    const LMConfig cfg = config_from(manifest.at("config"));
    tensors = make_tensors(cfg, mk);
    const auto& listed = manifest.at("tensors");
    if (listed.size() != tensors.size()) throw Error(Errc::ConfigMismatch, "tensor count does not match config");
    Weights weights(parameter_count(cfg, mk));
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      const auto& t = tensors[i];
      if (listed[i].at("name").get<std::string>() != t.name ||
          listed[i].at("shape").get<std::vector<std::size_t>>() != t.shape) {
        throw Error(Errc::ConfigMismatch, "tensor " + t.name + " does not match config");
      }
      const auto path = dir / listed[i].at("file").get<std::string>();
      std::ifstream bin(path, std::ios::binary);
      if (!bin) throw Error(Errc::IoError, "cannot open " + path.string());
      bin.read(reinterpret_cast<char*>(weights.data() + t.offset), static_cast<std::streamsize>(t.size * sizeof(float)));
      if (bin.gcount() != static_cast<std::streamsize>(t.size * sizeof(float)) || bin.peek() != EOF) {
        throw Error(Errc::ConfigMismatch, "tensor file " + path.string() + " has the wrong size");
      }
    }
    return {cfg, std::move(weights)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigMismatch, std::string("malformed manifest: ") + e.what());
  }
}

}  // namespace

void save_checkpoint(const LanguageModel& m, const std::filesystem::path& dir) {
  save(m.config, "generator", m.tensors, m.weights, dir);
}

void save_checkpoint(const DetectorModel& d, const std::filesystem::path& dir) {
  save(d.config, "detector", d.tensors, d.weights, dir);
}

LanguageModel load_lm(const std::filesystem::path& dir) {
  LanguageModel m;
  auto [cfg, w] = load(dir, "generator", ModelKind::Generator, m.tensors);
  m.config = cfg;
  m.weights = std::move(w);
  return m;
}

DetectorModel load_detector(const std::filesystem::path& dir) {
  DetectorModel d;
  auto [cfg, w] = load(dir, "detector", ModelKind::Detector, d.tensors);
  d.config = cfg;
  d.weights = std::move(w);
  return d;
}

}  // namespace catgen

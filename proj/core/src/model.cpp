// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "catgen/error.hpp"
#include "catgen/neural.hpp"
#include "model_internal.hpp"
#include "transformer.hpp"

namespace catgen {
namespace detail {
namespace {

struct TableBuilder {
  std::vector<TensorInfo> tensors;
  std::size_t next = 0;

  std::size_t add(std::string name, std::vector<std::size_t> shape) {
    std::size_t size = 1;
    for (auto s : shape) size *= s;
    tensors.push_back({std::move(name), std::move(shape), next, size});
    const std::size_t off = next;
    next += size;
    return off;
  }
};

std::pair<Layout, std::vector<TensorInfo>> build(const LMConfig& cfg, ModelKind kind) {
  const auto d = static_cast<std::size_t>(cfg.d_model);
  const auto ff = static_cast<std::size_t>(cfg.d_ff);
  const auto v = static_cast<std::size_t>(cfg.vocab_size);
  const auto ctx = static_cast<std::size_t>(cfg.context_len);
  TableBuilder b;
  Layout lay;
  lay.wte = b.add("wte", {v, d});
  lay.wpe = b.add("wpe", {ctx, d});
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string p = "h" + std::to_string(l) + ".";
    LayerOffsets o{};
    o.ln1_g = b.add(p + "ln1.g", {d});
    o.ln1_b = b.add(p + "ln1.b", {d});
    o.w_qkv = b.add(p + "attn.w_qkv", {d, 3 * d});
    o.b_qkv = b.add(p + "attn.b_qkv", {3 * d});
    o.w_out = b.add(p + "attn.w_out", {d, d});
    o.b_out = b.add(p + "attn.b_out", {d});
    o.ln2_g = b.add(p + "ln2.g", {d});
    o.ln2_b = b.add(p + "ln2.b", {d});
    o.w_fc = b.add(p + "mlp.w_fc", {d, ff});
    o.b_fc = b.add(p + "mlp.b_fc", {ff});
    o.w_proj = b.add(p + "mlp.w_proj", {ff, d});
    o.b_proj = b.add(p + "mlp.b_proj", {d});
    lay.layers.push_back(o);
  }
  lay.lnf_g = b.add("ln_f.g", {d});
  lay.lnf_b = b.add("ln_f.b", {d});
  if (kind == ModelKind::Generator) {
    lay.head_w = b.add("lm_head.w", {d, v});
  } else {
    lay.head_w = b.add("head.w", {d});
    lay.head_b = b.add("head.b", {1});
  }
  lay.total = b.next;
  return {std::move(lay), std::move(b.tensors)};
}

bool is_gain(const std::string& name) { return name.size() > 2 && name.ends_with(".g"); }

Weights init_weights(const LMConfig& cfg, const std::vector<TensorInfo>& tensors, std::size_t total) {
  Weights w(total, 0.0f);
  Rng rng(cfg.seed);
  for (const auto& t : tensors) {
    const std::string& n = t.name;
    const bool bias = n.ends_with(".b") || n.ends_with(".b_qkv") || n.ends_with(".b_out") ||
                      n.ends_with(".b_fc") || n.ends_with(".b_proj") || n == "head.b";
    if (is_gain(n)) {
      std::fill_n(w.begin() + static_cast<std::ptrdiff_t>(t.offset), t.size, 1.0f);
    } else if (!bias) {
      for (std::size_t i = 0; i < t.size; ++i) w[t.offset + i] = static_cast<float>(rng.normal(0.0, 0.02));
    }
  }
  return w;
}

}  // namespace

Layout layout_of(const LMConfig& cfg, ModelKind kind) { return build(cfg, kind).first; }

void check_length(const LMConfig& cfg, std::size_t n) {
  if (n > static_cast<std::size_t>(cfg.context_len)) {
    throw Error(Errc::SequenceTooLong,
                "sequence of " + std::to_string(n) + " tokens exceeds context " + std::to_string(cfg.context_len));
  }
}

void check_tokens(const LMConfig& cfg, std::span<const TokenId> tokens) {
  for (TokenId t : tokens) {
    if (t < 0 || t >= cfg.vocab_size) throw Error(Errc::OutOfRange, "token id " + std::to_string(t));
  }
}

std::span<const TokenId> strip_padding(std::span<const TokenId> tokens) {
  std::size_t n = tokens.size();
  while (n > 0 && tokens[n - 1] == kPad) --n;
  return tokens.first(n);
}

}  // namespace detail

using detail::Layout;
using detail::MatX;
using detail::Transformer;

void validate(const LMConfig& cfg) {
  auto bad = [](const std::string& why) { throw Error(Errc::BadConfig, why); };
  if (cfg.n_layers < 0) bad("n_layers must be non-negative");
  if (cfg.n_heads <= 0 || cfg.d_model <= 0 || cfg.d_ff <= 0) bad("heads, d_model and d_ff must be positive");
  if (cfg.d_model % cfg.n_heads != 0) {
    bad("d_model " + std::to_string(cfg.d_model) + " not divisible by n_heads " + std::to_string(cfg.n_heads));
  }
  if (cfg.context_len < static_cast<int>(token_count(1))) bad("context_len must hold at least one atom");
  if (cfg.vocab_size != kVocabSize) bad("vocab_size must be " + std::to_string(kVocabSize));
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) bad("dropout must be in [0, 1)");
}

std::vector<TensorInfo> make_tensors(const LMConfig& cfg, ModelKind kind) {
  validate(cfg);
  return detail::build(cfg, kind).second;
}

std::size_t parameter_count(const LMConfig& cfg, ModelKind kind) {
  const auto d = static_cast<std::size_t>(cfg.d_model);
  const auto ff = static_cast<std::size_t>(cfg.d_ff);
  const auto v = static_cast<std::size_t>(cfg.vocab_size);
  const auto ctx = static_cast<std::size_t>(cfg.context_len);
  const std::size_t per_layer = 4 * d + (3 * d * d + 3 * d) + (d * d + d) + (d * ff + ff) + (ff * d + d);
  const std::size_t head = kind == ModelKind::Generator ? d * v : d + 1;
  return v * d + ctx * d + static_cast<std::size_t>(cfg.n_layers) * per_layer + 2 * d + head;
}

LanguageModel init_lm(const LMConfig& cfg) {
  validate(cfg);
  auto [lay, tensors] = detail::build(cfg, ModelKind::Generator);
  auto w = detail::init_weights(cfg, tensors, lay.total);
  return {cfg, std::move(tensors), std::move(w)};
}

DetectorModel init_detector(const LMConfig& cfg) {
  validate(cfg);
  auto [lay, tensors] = detail::build(cfg, ModelKind::Detector);
  auto w = detail::init_weights(cfg, tensors, lay.total);
  return {cfg, std::move(tensors), std::move(w)};
}

Logits lm_forward(const LanguageModel& m, std::span<const TokenId> tokens) {
  detail::check_length(m.config, tokens.size());
  detail::check_tokens(m.config, tokens);
  Logits out;
  out.rows = tokens.size();
  out.cols = static_cast<std::size_t>(m.config.vocab_size);
  if (tokens.empty()) return out;
  const Layout lay = detail::layout_of(m.config, ModelKind::Generator);
  Transformer<float> net(m.config, lay, m.weights.data());
  detail::Cache<float> cache;
  net.forward(tokens, true, cache, nullptr);
  const MatX<float> logits = cache.hf * net.mat(lay.head_w, m.config.d_model, m.config.vocab_size);
  out.values.assign(logits.data(), logits.data() + logits.size());
  return out;
}

SampleResult sample(const LanguageModel& m, const SampleParams& p) {
  if (!(p.temperature > 0.0) || !std::isfinite(p.temperature)) {
    throw Error(Errc::OutOfRange, "temperature must be finite and > 0");
  }
  TokenSeq prompt{kBos};
  if (p.lattice_prompt) {
    Structure probe;
    probe.lattice = *p.lattice_prompt;
    const TokenSeq enc = encode(probe);
    prompt.assign(enc.begin(), enc.begin() + 7);
  }
  const std::size_t limit = std::min(p.max_len, static_cast<std::size_t>(m.config.context_len));
  detail::check_length(m.config, prompt.size());

  const Layout lay = detail::layout_of(m.config, ModelKind::Generator);
  Transformer<float> net(m.config, lay, m.weights.data());
  const auto head = net.mat(lay.head_w, m.config.d_model, m.config.vocab_size);
  auto kv = net.make_kv();
  Rng rng(p.seed);

  SampleResult out;
  out.tokens = prompt;
  if (prompt.size() >= limit) {
    out.truncated = true;
    return out;
  }
  detail::RowX<float> hf;
  for (TokenId t : prompt) hf = net.step(t, kv);

  const bool greedy = p.temperature < kArgmaxTemperature;
  std::vector<double> probs(static_cast<std::size_t>(m.config.vocab_size));
  for (;;) {
    const detail::RowX<float> logits = hf * head;
    TokenId next = 0;
    if (greedy) {
      float best = -std::numeric_limits<float>::infinity();
      for (Eigen::Index i = 0; i < logits.size(); ++i) {
        if (i == kPad) continue;
        if (logits[i] > best) {
          best = logits[i];
          next = static_cast<TokenId>(i);
        }
      }
    } else {
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < logits.size(); ++i) {
        if (i != kPad) mx = std::max(mx, static_cast<double>(logits[i]));
      }
      double total = 0.0;
      for (Eigen::Index i = 0; i < logits.size(); ++i) {
        const double e = i == kPad ? 0.0 : std::exp((static_cast<double>(logits[i]) - mx) / p.temperature);
        probs[static_cast<std::size_t>(i)] = e;
        total += e;
      }
      const double u = rng.uniform() * total;
      double acc = 0.0;
      next = kEos;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc && probs[i] > 0.0) {
          next = static_cast<TokenId>(i);
          break;
        }
      }
    }
    out.tokens.push_back(next);
    if (next == kEos) break;
    if (out.tokens.size() >= limit) {
      out.truncated = true;
      break;
    }
    hf = net.step(next, kv);
  }
  return out;
}

std::vector<double> eos_profile(const LanguageModel& m, std::span<const TokenId> tokens) {
  const Logits logits = lm_forward(m, tokens);
  std::vector<double> out(logits.rows);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const auto r = logits.row(i);
    double mx = -std::numeric_limits<double>::infinity();
    for (float v : r) mx = std::max(mx, static_cast<double>(v));
    double total = 0.0;
    for (float v : r) total += std::exp(static_cast<double>(v) - mx);
    out[i] = std::exp(static_cast<double>(r[kEos]) - mx) / total;
  }
  return out;
}

double detector_score(const DetectorModel& d, std::span<const TokenId> tokens) {
  tokens = detail::strip_padding(tokens);
  detail::check_length(d.config, tokens.size());
  detail::check_tokens(d.config, tokens);
  if (tokens.empty()) throw Error(Errc::EmptyInput, "detector input is empty");
  const Layout lay = detail::layout_of(d.config, ModelKind::Detector);
  Transformer<float> net(d.config, lay, d.weights.data());
  detail::Cache<float> cache;
  net.forward(tokens, false, cache, nullptr);
  const double z = static_cast<double>(cache.hf.row(0).dot(net.row(lay.head_w, d.config.d_model))) +
                   static_cast<double>(d.weights[lay.head_b]);
  return 1.0 / (1.0 + std::exp(-z));
}

double detector_accuracy(const DetectorModel& d, const std::vector<LabeledSeq>& data) {
  if (data.empty()) throw Error(Errc::EmptyInput, "accuracy of an empty set");
  std::size_t correct = 0;
  for (const auto& item : data) {
    const int predicted = detector_score(d, item.tokens) >= kDetectorThreshold ? 1 : 0;
    if (predicted == item.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace catgen

// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

// Desk-scale transformer generator and anomaly detector.
//
// Both models share one pre-norm block stack with learned absolute position
// embeddings. The generator applies a causal mask and projects every
// position onto the vocabulary; the detector attends bidirectionally and
// squashes a scalar head on the position-0 (<bos>) embedding through the
// logistic function.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <new>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "catgen/codec.hpp"
#include "catgen/datagen.hpp"

namespace catgen {

struct LMConfig {
  int n_layers = 4;
  int n_heads = 4;
  int d_model = 128;
  int d_ff = 512;
  int context_len = 512;
  int vocab_size = kVocabSize;
  double dropout = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const LMConfig&, const LMConfig&) = default;
};

// Throws BadConfig.
void validate(const LMConfig& cfg);

// 64-byte aligned storage. Vectorized reductions over weight buffers then
// take the same code path on every run, so training and sampling are
// bit-reproducible regardless of where the heap places them.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <typename T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;
using Weights = AlignedVector<float>;

enum class ModelKind { Generator, Detector };

struct TensorInfo {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;  // into the flat weight vector
  std::size_t size = 0;
};

// Ordered tensor table for a config; offsets are contiguous.
std::vector<TensorInfo> make_tensors(const LMConfig& cfg, ModelKind kind);

// Closed-form parameter count for a config.
std::size_t parameter_count(const LMConfig& cfg, ModelKind kind);

struct LanguageModel {
  LMConfig config;
  std::vector<TensorInfo> tensors;
  Weights weights;
};

struct DetectorModel {
  LMConfig config;
  std::vector<TensorInfo> tensors;
  Weights weights;
};

// Weights ~ N(0, 0.02) from config.seed; LayerNorm gains 1, biases 0.
// Throws BadConfig.
LanguageModel init_lm(const LMConfig& cfg);
DetectorModel init_detector(const LMConfig& cfg);

// positions x vocab, row-major. Throws SequenceTooLong.
struct Logits {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;

  std::span<const float> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
};

Logits lm_forward(const LanguageModel& m, std::span<const TokenId> tokens);

struct TrainConfig {
  int epochs = 30;
  int batch_size = 8;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 1.0;  // <= 0 disables clipping
  // Learning rate is annealed linearly from lr to lr * final_lr_fraction over
  // the run; 1.0 keeps it constant.
  double final_lr_fraction = 1.0;
  std::uint64_t seed = 0;
};

struct CurvePoint {
  int epoch = 0;
  std::string split;   // "train" or "val"
  std::string metric;  // "loss" or "accuracy"
  double value = 0.0;
};

// Writes the points of one metric as "epoch,split,value" rows.
void write_curve_csv(const std::vector<CurvePoint>& curve, std::string_view metric,
                     const std::filesystem::path& path);

struct LmTrainResult {
  LanguageModel model;
  std::vector<CurvePoint> curve;
  double final_train_loss = 0.0;
};

// Supplies the training sequences for a given epoch (0-based); lets callers
// re-augment data every epoch.
using EpochData = std::function<std::vector<TokenSeq>(int epoch)>;

// Mean next-token cross-entropy over non-<pad> targets, Adam with global
// norm clipping. The train loss of an epoch is the token-weighted mean over
// its batches. Throws SequenceTooLong, NonFiniteLoss.
LmTrainResult train_lm(LanguageModel m, const std::vector<TokenSeq>& train, const std::vector<TokenSeq>& val,
                       const TrainConfig& tc);
LmTrainResult train_lm(LanguageModel m, const EpochData& train, const std::vector<TokenSeq>& val,
                       const TrainConfig& tc);

// train_lm starting from `pretrained`; `expected` must match its config.
// Throws ConfigMismatch.
LmTrainResult finetune_lm(const LanguageModel& pretrained, const LMConfig& expected,
                          const std::vector<TokenSeq>& train, const std::vector<TokenSeq>& val,
                          const TrainConfig& tc);
LmTrainResult finetune_lm(const LanguageModel& pretrained, const std::vector<TokenSeq>& train,
                          const std::vector<TokenSeq>& val, const TrainConfig& tc);

// Token-weighted mean cross-entropy without updating the model.
double lm_loss(const LanguageModel& m, const std::vector<TokenSeq>& seqs);

struct SampleParams {
  double temperature = 1.0;
  std::size_t max_len = 512;
  std::optional<Lattice> lattice_prompt;  // nullopt: <bos> only
  std::uint64_t seed = 0;
};

inline constexpr double kArgmaxTemperature = 1e-6;

struct SampleResult {
  TokenSeq tokens;
  bool truncated = false;  // stopped at max_len / context without <eos>
};

// Categorical sampling from softmax(logits / tau) with <pad> removed from the
// support; argmax when tau < 1e-6.
SampleResult sample(const LanguageModel& m, const SampleParams& p);

// Probability of <eos> as the next token after each position.
std::vector<double> eos_profile(const LanguageModel& m, std::span<const TokenId> tokens);

// In [0, 1]; a sequence is judged valid iff score >= 0.5.
double detector_score(const DetectorModel& d, std::span<const TokenId> tokens);
inline constexpr double kDetectorThreshold = 0.5;

double detector_accuracy(const DetectorModel& d, const std::vector<LabeledSeq>& data);

struct DetectorTrainResult {
  DetectorModel model;
  std::vector<CurvePoint> curve;  // train loss, val accuracy per epoch
  double final_accuracy = 0.0;    // on `val` (train set if val empty)
};

// Binary cross-entropy on the scalar head. Throws NonFiniteLoss.
DetectorTrainResult train_detector(DetectorModel d, const std::vector<LabeledSeq>& train,
                                   const std::vector<LabeledSeq>& val, const TrainConfig& tc);

// Loss and flat gradient (same layout as weights), computed in double.
struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};
LossGrad lm_loss_grad(const LanguageModel& m, const std::vector<TokenSeq>& batch);
LossGrad detector_loss_grad(const DetectorModel& d, const std::vector<LabeledSeq>& batch);

struct GradCheckOptions {
  std::size_t num_weights = 256;
  std::uint64_t seed = 0;
  // Test hook applied to the analytic gradient before comparison.
  std::function<void(std::span<double>)> perturb_analytic;
};

// Max over sampled weights of |analytic - numeric| / max(|analytic| +
// |numeric|, 1e-7), central differences in double precision.
double grad_check(const LanguageModel& m, const std::vector<TokenSeq>& batch, double eps,
                  const GradCheckOptions& opts = {});
double grad_check(const DetectorModel& d, const std::vector<LabeledSeq>& batch, double eps,
                  const GradCheckOptions& opts = {});

// Directory with manifest.json and one little-endian float32 .bin per tensor.
void save_checkpoint(const LanguageModel& m, const std::filesystem::path& dir);
void save_checkpoint(const DetectorModel& d, const std::filesystem::path& dir);
LanguageModel load_lm(const std::filesystem::path& dir);
DetectorModel load_detector(const std::filesystem::path& dir);

}  // namespace catgen

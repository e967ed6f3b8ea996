// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "catgen/error.hpp"
#include "catgen/neural.hpp"
#include "model_internal.hpp"
#include "transformer.hpp"

namespace catgen {
namespace {

using detail::Layout;
using detail::MatX;
using detail::Transformer;

struct LossSum {
  double total = 0.0;
  std::size_t count = 0;
};

std::size_t count_targets(std::span<const TokenId> seq) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i] != kPad) ++n;
  }
  return n;
}

// Sum of next-token cross-entropy over the batch. When `grad` is non-null,
// accumulates d(mean loss)/dw into it.
template <typename T>
LossSum lm_batch(const LMConfig& cfg, const Layout& lay, const T* w, std::span<const TokenSeq* const> batch,
                 T* grad, Rng* dropout_rng) {
  Transformer<T> net(cfg, lay, w);
  const auto d = static_cast<Eigen::Index>(cfg.d_model);
  const auto v = static_cast<Eigen::Index>(cfg.vocab_size);
  const auto head = net.mat(lay.head_w, d, v);

  std::size_t total_targets = 0;
  for (const TokenSeq* seq : batch) total_targets += count_targets(detail::strip_padding(*seq));
  LossSum out;
  out.count = total_targets;
  if (total_targets == 0) return out;
  const T inv_total = T(1) / static_cast<T>(total_targets);

  detail::Cache<T> cache;
  for (const TokenSeq* seq_ptr : batch) {
    const auto seq = detail::strip_padding(*seq_ptr);
    if (seq.size() < 2) continue;
    net.forward(seq, true, cache, dropout_rng);
    MatX<T> logits = cache.hf * head;
    const auto n = static_cast<Eigen::Index>(seq.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      auto r = logits.row(i);
      const bool has_target = i + 1 < n && seq[static_cast<std::size_t>(i + 1)] != kPad;
      if (!has_target) {
        r.setZero();
        continue;
      }
      const TokenId target = seq[static_cast<std::size_t>(i + 1)];
      const T mx = r.maxCoeff();
      r = (r.array() - mx).exp().matrix();
      const T sum = r.sum();
      out.total -= static_cast<double>(std::log(r[target] / sum));
      r /= sum;
      r[target] -= T(1);
      r *= inv_total;
    }
    if (grad != nullptr) {
      Transformer<T>::gmat(grad, lay.head_w, d, v).noalias() += cache.hf.transpose() * logits;
      const MatX<T> dhf = logits * head.transpose();
      net.backward(cache, dhf, grad);
    }
  }
  return out;
}

template <typename T>
LossSum detector_batch(const LMConfig& cfg, const Layout& lay, const T* w, std::span<const LabeledSeq* const> batch,
                       T* grad, Rng* dropout_rng) {
  Transformer<T> net(cfg, lay, w);
  const auto d = static_cast<Eigen::Index>(cfg.d_model);
  const auto head = net.row(lay.head_w, d);
  const T bias = w[lay.head_b];
  const T inv_b = T(1) / static_cast<T>(batch.size());
  LossSum out;
  out.count = batch.size();
  detail::Cache<T> cache;
  for (const LabeledSeq* item : batch) {
    const auto seq = detail::strip_padding(item->tokens);
    net.forward(seq, false, cache, dropout_rng);
    const T z = cache.hf.row(0).dot(head) + bias;
    const T y = static_cast<T>(item->label);
    // Stable BCE on the logit.
    out.total += static_cast<double>(std::max(z, T(0)) - z * y + std::log1p(std::exp(-std::abs(z))));
    if (grad != nullptr) {
      const T s = T(1) / (T(1) + std::exp(-z));
      const T dz = (s - y) * inv_b;
      Transformer<T>::grow(grad, lay.head_w, d) += dz * cache.hf.row(0);
      grad[lay.head_b] += dz;
      MatX<T> dhf = MatX<T>::Zero(cache.hf.rows(), d);
      dhf.row(0) = dz * head;
      net.backward(cache, dhf, grad);
    }
  }
  return out;
}

void check_sequences(const LMConfig& cfg, const std::vector<TokenSeq>& seqs) {
  for (const auto& s : seqs) {
    detail::check_length(cfg, detail::strip_padding(s).size());
    detail::check_tokens(cfg, s);
  }
}

void check_labeled(const LMConfig& cfg, const std::vector<LabeledSeq>& seqs) {
  for (const auto& s : seqs) {
    const auto stripped = detail::strip_padding(s.tokens);
    if (stripped.empty()) throw Error(Errc::EmptyInput, "empty labeled sequence");
    detail::check_length(cfg, stripped.size());
    detail::check_tokens(cfg, s.tokens);
    if (s.label != 0 && s.label != 1) throw Error(Errc::OutOfRange, "labels must be 0 or 1");
  }
}

class Adam {
 public:
  Adam(const TrainConfig& tc, std::size_t n) : tc_(tc), m_(n, 0.0f), v_(n, 0.0f) {}

  // progress in [0, 1) through the whole run.
  void step(Weights& w, Weights& g, double progress) {
    if (tc_.clip_norm > 0.0) {
      double sq = 0.0;
      for (float x : g) sq += static_cast<double>(x) * x;
      const double norm = std::sqrt(sq);
      if (norm > tc_.clip_norm) {
        const auto scale = static_cast<float>(tc_.clip_norm / (norm + 1e-6));
        for (float& x : g) x *= scale;
      }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(tc_.beta1, t_);
    const double bc2 = 1.0 - std::pow(tc_.beta2, t_);
    const auto b1 = static_cast<float>(tc_.beta1);
    const auto b2 = static_cast<float>(tc_.beta2);
    const double lr = tc_.lr * (1.0 - (1.0 - tc_.final_lr_fraction) * progress);
    const auto step = static_cast<float>(lr / bc1);
    const auto inv_bc2 = static_cast<float>(1.0 / bc2);
    const auto eps = static_cast<float>(tc_.eps);
    for (std::size_t i = 0; i < w.size(); ++i) {
      m_[i] = b1 * m_[i] + (1.0f - b1) * g[i];
      v_[i] = b2 * v_[i] + (1.0f - b2) * g[i] * g[i];
      w[i] -= step * m_[i] / (std::sqrt(v_[i] * inv_bc2) + eps);
    }
  }

 private:
  TrainConfig tc_;
  std::vector<float> m_, v_;
  int t_ = 0;
};

double progress(int epoch, std::size_t batch, std::size_t n_batches, int epochs) {
  return (static_cast<double>(epoch) + static_cast<double>(batch) / static_cast<double>(n_batches)) /
         static_cast<double>(epochs);
}

void validate(const TrainConfig& tc) {
  if (tc.epochs < 0 || tc.batch_size <= 0 || tc.lr < 0.0 || !(tc.beta1 >= 0.0 && tc.beta1 < 1.0) ||
      !(tc.beta2 >= 0.0 && tc.beta2 < 1.0) || tc.eps <= 0.0 ||
      !(tc.final_lr_fraction >= 0.0 && tc.final_lr_fraction <= 1.0)) {
    throw Error(Errc::BadConfig, "invalid training configuration");
  }
}

[[noreturn]] void non_finite(const char* what, int epoch, std::size_t batch, double value) {
  std::ostringstream os;
  os << what << " loss is " << value << " at epoch " << epoch << ", batch " << batch;
  throw Error(Errc::NonFiniteLoss, os.str());
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n, int batch_size, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(n, i + static_cast<std::size_t>(batch_size));
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

bool architecture_equal(const LMConfig& a, const LMConfig& b) {
  return a.n_layers == b.n_layers && a.n_heads == b.n_heads && a.d_model == b.d_model && a.d_ff == b.d_ff &&
         a.context_len == b.context_len && a.vocab_size == b.vocab_size;
}

template <typename Item, typename LossFn>
double grad_check_impl(const LMConfig& cfg, ModelKind kind, const Weights& weights,
                       const std::vector<Item>& batch, double eps, const GradCheckOptions& opts, LossFn loss_grad) {
  if (!(eps >= 1e-6 && eps <= 1e-3)) throw Error(Errc::OutOfRange, "grad_check eps must be in [1e-6, 1e-3]");
  const Layout lay = detail::layout_of(cfg, kind);
  const auto tensors = make_tensors(cfg, kind);
  AlignedVector<double> w(weights.begin(), weights.end());
  AlignedVector<double> analytic(w.size(), 0.0);
  loss_grad(lay, w.data(), batch, analytic.data());
  if (opts.perturb_analytic) opts.perturb_analytic(analytic);

  Rng rng(opts.seed);
  const std::size_t samples = std::max<std::size_t>(200, opts.num_weights);
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const TensorInfo& t = tensors[static_cast<std::size_t>(rng.below(tensors.size()))];
    const std::size_t idx = t.offset + static_cast<std::size_t>(rng.below(t.size));
    const double saved = w[idx];
    w[idx] = saved + eps;
    const double plus = loss_grad(lay, w.data(), batch, nullptr);
    w[idx] = saved - eps;
    const double minus = loss_grad(lay, w.data(), batch, nullptr);
    w[idx] = saved;
    const double numeric = (plus - minus) / (2.0 * eps);
    const double denom = std::max(std::abs(analytic[idx]) + std::abs(numeric), 1e-7);
    worst = std::max(worst, std::abs(analytic[idx] - numeric) / denom);
  }
  return worst;
}

std::vector<const TokenSeq*> pointers(const std::vector<TokenSeq>& v) {
  std::vector<const TokenSeq*> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(&s);
  return out;
}

std::vector<const LabeledSeq*> pointers(const std::vector<LabeledSeq>& v) {
  std::vector<const LabeledSeq*> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(&s);
  return out;
}

}  // namespace

double lm_loss(const LanguageModel& m, const std::vector<TokenSeq>& seqs) {
  check_sequences(m.config, seqs);
  const Layout lay = detail::layout_of(m.config, ModelKind::Generator);
  const auto ptrs = pointers(seqs);
  const LossSum s = lm_batch<float>(m.config, lay, m.weights.data(), ptrs, nullptr, nullptr);
  if (s.count == 0) throw Error(Errc::EmptyInput, "no prediction targets");
  return s.total / static_cast<double>(s.count);
}

LmTrainResult train_lm(LanguageModel m, const EpochData& train, const std::vector<TokenSeq>& val,
                       const TrainConfig& tc) {
  validate(tc);
  check_sequences(m.config, val);
  const Layout lay = detail::layout_of(m.config, ModelKind::Generator);
  Adam adam(tc, m.weights.size());
  Rng rng(tc.seed);
  Rng dropout_rng(mix_seed(tc.seed, 1));
  Weights grad(m.weights.size());

  LmTrainResult result;
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    const std::vector<TokenSeq> data = train(epoch);
    check_sequences(m.config, data);
    if (data.empty()) throw Error(Errc::EmptyInput, "empty training set");
    double loss_sum = 0.0;
    std::size_t target_sum = 0;
    const auto batches = make_batches(data.size(), tc.batch_size, rng);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      std::vector<const TokenSeq*> batch;
      for (auto i : batches[b]) batch.push_back(&data[i]);
      std::fill(grad.begin(), grad.end(), 0.0f);
      const LossSum s = lm_batch<float>(m.config, lay, m.weights.data(), batch, grad.data(), &dropout_rng);
      if (!std::isfinite(s.total)) non_finite("train", epoch, b, s.total);
      loss_sum += s.total;
      target_sum += s.count;
      adam.step(m.weights, grad, progress(epoch, b, batches.size(), tc.epochs));
    }
    result.final_train_loss = target_sum ? loss_sum / static_cast<double>(target_sum) : 0.0;
    result.curve.push_back({epoch, "train", "loss", result.final_train_loss});
    if (!val.empty()) {
      const double vl = lm_loss(m, val);
      if (!std::isfinite(vl)) non_finite("validation", epoch, 0, vl);
      result.curve.push_back({epoch, "val", "loss", vl});
    }
  }
  result.model = std::move(m);
  return result;
}

LmTrainResult train_lm(LanguageModel m, const std::vector<TokenSeq>& train, const std::vector<TokenSeq>& val,
                       const TrainConfig& tc) {
  return train_lm(std::move(m), EpochData([&train](int) { return train; }), val, tc);
}

LmTrainResult finetune_lm(const LanguageModel& pretrained, const LMConfig& expected,
                          const std::vector<TokenSeq>& train, const std::vector<TokenSeq>& val,
                          const TrainConfig& tc) {
  if (!architecture_equal(pretrained.config, expected)) {
    throw Error(Errc::ConfigMismatch, "fine-tuning config differs from the pretrained model");
  }
  if (pretrained.weights.size() != parameter_count(pretrained.config, ModelKind::Generator)) {
    throw Error(Errc::ConfigMismatch, "pretrained weights do not match their config");
  }
  for (const auto* set : {&train, &val}) {
    for (const auto& s : *set) {
      for (TokenId t : s) {
        if (t < 0 || t >= pretrained.config.vocab_size) {
          throw Error(Errc::ConfigMismatch, "token id " + std::to_string(t) + " outside the pretrained vocabulary");
        }
      }
    }
  }
  return train_lm(pretrained, train, val, tc);
}

LmTrainResult finetune_lm(const LanguageModel& pretrained, const std::vector<TokenSeq>& train,
                          const std::vector<TokenSeq>& val, const TrainConfig& tc) {
  return finetune_lm(pretrained, pretrained.config, train, val, tc);
}

DetectorTrainResult train_detector(DetectorModel d, const std::vector<LabeledSeq>& train,
                                   const std::vector<LabeledSeq>& val, const TrainConfig& tc) {
  validate(tc);
  check_labeled(d.config, train);
  check_labeled(d.config, val);
  if (train.empty()) throw Error(Errc::EmptyInput, "empty detector training set");
  const Layout lay = detail::layout_of(d.config, ModelKind::Detector);
  Adam adam(tc, d.weights.size());
  Rng rng(tc.seed);
  Rng dropout_rng(mix_seed(tc.seed, 1));
  Weights grad(d.weights.size());

  DetectorTrainResult result;
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    double loss_sum = 0.0;
    const auto batches = make_batches(train.size(), tc.batch_size, rng);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      std::vector<const LabeledSeq*> batch;
      for (auto i : batches[b]) batch.push_back(&train[i]);
      std::fill(grad.begin(), grad.end(), 0.0f);
      const LossSum s = detector_batch<float>(d.config, lay, d.weights.data(), batch, grad.data(), &dropout_rng);
      if (!std::isfinite(s.total)) non_finite("train", epoch, b, s.total);
      loss_sum += s.total;
      adam.step(d.weights, grad, progress(epoch, b, batches.size(), tc.epochs));
    }
    result.curve.push_back({epoch, "train", "loss", loss_sum / static_cast<double>(train.size())});
    if (!val.empty()) result.curve.push_back({epoch, "val", "accuracy", detector_accuracy(d, val)});
  }
  result.final_accuracy = detector_accuracy(d, val.empty() ? train : val);
  result.model = std::move(d);
  return result;
}

LossGrad lm_loss_grad(const LanguageModel& m, const std::vector<TokenSeq>& batch) {
  check_sequences(m.config, batch);
  const Layout lay = detail::layout_of(m.config, ModelKind::Generator);
  AlignedVector<double> w(m.weights.begin(), m.weights.end());
  AlignedVector<double> grad(w.size(), 0.0);
  const auto ptrs = pointers(batch);
  const LossSum s = lm_batch<double>(m.config, lay, w.data(), ptrs, grad.data(), nullptr);
  LossGrad out;
  out.grad.assign(grad.begin(), grad.end());
  if (s.count == 0) throw Error(Errc::EmptyInput, "no prediction targets");
  out.loss = s.total / static_cast<double>(s.count);
  return out;
}

LossGrad detector_loss_grad(const DetectorModel& d, const std::vector<LabeledSeq>& batch) {
  check_labeled(d.config, batch);
  if (batch.empty()) throw Error(Errc::EmptyInput, "empty batch");
  const Layout lay = detail::layout_of(d.config, ModelKind::Detector);
  AlignedVector<double> w(d.weights.begin(), d.weights.end());
  AlignedVector<double> grad(w.size(), 0.0);
  const auto ptrs = pointers(batch);
  const LossSum s = detector_batch<double>(d.config, lay, w.data(), ptrs, grad.data(), nullptr);
  LossGrad out;
  out.grad.assign(grad.begin(), grad.end());
  out.loss = s.total / static_cast<double>(s.count);
  return out;
}

double grad_check(const LanguageModel& m, const std::vector<TokenSeq>& batch, double eps,
                  const GradCheckOptions& opts) {
  check_sequences(m.config, batch);
  const auto ptrs = pointers(batch);
  return grad_check_impl(m.config, ModelKind::Generator, m.weights, batch, eps, opts,
                         [&](const Layout& lay, const double* w, const std::vector<TokenSeq>&, double* grad) {
                           const LossSum s = lm_batch<double>(m.config, lay, w, ptrs, grad, nullptr);
                           return s.total / static_cast<double>(std::max<std::size_t>(1, s.count));
                         });
}

double grad_check(const DetectorModel& d, const std::vector<LabeledSeq>& batch, double eps,
                  const GradCheckOptions& opts) {
  check_labeled(d.config, batch);
  if (batch.empty()) throw Error(Errc::EmptyInput, "empty batch");
  const auto ptrs = pointers(batch);
  return grad_check_impl(d.config, ModelKind::Detector, d.weights, batch, eps, opts,
                         [&](const Layout& lay, const double* w, const std::vector<LabeledSeq>&, double* grad) {
                           const LossSum s = detector_batch<double>(d.config, lay, w, ptrs, grad, nullptr);
                           return s.total / static_cast<double>(s.count);
                         });
}

void write_curve_csv(const std::vector<CurvePoint>& curve, std::string_view metric,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << "epoch,split,value\n";
  out.precision(17);
  for (const auto& p : curve) {
    if (p.metric == metric) out << p.epoch << ',' << p.split << ',' << p.value << '\n';
  }
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

}  // namespace catgen

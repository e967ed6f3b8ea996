// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

// Pre-norm transformer stack shared by the generator (causal) and the
// detector (bidirectional). Templated on the scalar so gradient checks can
// run in double while training runs in float.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "catgen/neural.hpp"
#include "catgen/rng.hpp"

namespace catgen::detail {

template <typename T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using RowX = Eigen::Matrix<T, 1, Eigen::Dynamic>;
template <typename T>
using ColX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

struct LayerOffsets {
  std::size_t ln1_g, ln1_b, w_qkv, b_qkv, w_out, b_out;
  std::size_t ln2_g, ln2_b, w_fc, b_fc, w_proj, b_proj;
};

struct Layout {
  std::size_t wte = 0;
  std::size_t wpe = 0;
  std::vector<LayerOffsets> layers;
  std::size_t lnf_g = 0;
  std::size_t lnf_b = 0;
  std::size_t head_w = 0;
  std::size_t head_b = 0;  // detector only
  std::size_t total = 0;
};

// Rebuilds offsets from the tensor table produced by make_tensors().
Layout layout_of(const LMConfig& cfg, ModelKind kind);

template <typename T>
struct LayerCache {
  MatX<T> h_in, xhat1, a, qkv, o, h_mid, xhat2, m, f, tanh_f, g;
  ColX<T> rstd1, rstd2;
  std::vector<MatX<T>> probs;  // per head, n x n
  MatX<T> drop_attn, drop_mlp;  // empty when dropout is off
};

template <typename T>
struct Cache {
  std::vector<TokenId> tokens;
  MatX<T> drop_emb;
  std::vector<LayerCache<T>> layers;
  MatX<T> h_last, xhatf, hf;
  ColX<T> rstdf;
};

template <typename T>
struct KvCache {
  std::vector<MatX<T>> keys, values;  // per layer, context x d_model
  std::size_t len = 0;
};

template <typename T>
class Transformer {
 public:
  static constexpr T kLnEps = T(1e-5);

  Transformer(const LMConfig& cfg, const Layout& layout, const T* weights)
      : cfg_(cfg), lay_(layout), w_(weights), d_(cfg.d_model), dh_(cfg.d_model / cfg.n_heads) {}

  // Full-sequence forward. `rng` non-null enables dropout.
  void forward(std::span<const TokenId> x, bool causal, Cache<T>& c, Rng* rng) const {
    const auto n = static_cast<Eigen::Index>(x.size());
    c.tokens.assign(x.begin(), x.end());
    MatX<T> h(n, d_);
    const auto wte = mat(lay_.wte, cfg_.vocab_size, d_);
    const auto wpe = mat(lay_.wpe, cfg_.context_len, d_);
    for (Eigen::Index i = 0; i < n; ++i) h.row(i) = wte.row(x[static_cast<std::size_t>(i)]) + wpe.row(i);
    c.drop_emb = dropout_mask(n, d_, rng);
    if (c.drop_emb.size()) h.array() *= c.drop_emb.array();

    c.layers.resize(static_cast<std::size_t>(cfg_.n_layers));
    for (int l = 0; l < cfg_.n_layers; ++l) {
      const LayerOffsets& o = lay_.layers[static_cast<std::size_t>(l)];
      LayerCache<T>& lc = c.layers[static_cast<std::size_t>(l)];
      lc.h_in = h;
      layer_norm(h, o.ln1_g, o.ln1_b, lc.a, lc.xhat1, lc.rstd1);
      lc.qkv = lc.a * mat(o.w_qkv, d_, 3 * d_);
      lc.qkv.rowwise() += row(o.b_qkv, 3 * d_);
      lc.o.resize(n, d_);
      lc.probs.resize(static_cast<std::size_t>(cfg_.n_heads));
      const T scale = T(1) / std::sqrt(static_cast<T>(dh_));
      for (int hd = 0; hd < cfg_.n_heads; ++hd) {
        const auto q = lc.qkv.middleCols(hd * dh_, dh_);
        const auto k = lc.qkv.middleCols(d_ + hd * dh_, dh_);
        const auto v = lc.qkv.middleCols(2 * d_ + hd * dh_, dh_);
        MatX<T>& p = lc.probs[static_cast<std::size_t>(hd)];
        p = (q * k.transpose()) * scale;
        softmax_rows(p, causal);
        lc.o.middleCols(hd * dh_, dh_) = p * v;
      }
      MatX<T> y = lc.o * mat(o.w_out, d_, d_);
      y.rowwise() += row(o.b_out, d_);
      lc.drop_attn = dropout_mask(n, d_, rng);
      if (lc.drop_attn.size()) y.array() *= lc.drop_attn.array();
      h += y;
      lc.h_mid = h;

      layer_norm(h, o.ln2_g, o.ln2_b, lc.m, lc.xhat2, lc.rstd2);
      lc.f = lc.m * mat(o.w_fc, d_, cfg_.d_ff);
      lc.f.rowwise() += row(o.b_fc, cfg_.d_ff);
      gelu(lc.f, lc.tanh_f, lc.g);
      MatX<T> z = lc.g * mat(o.w_proj, cfg_.d_ff, d_);
      z.rowwise() += row(o.b_proj, d_);
      lc.drop_mlp = dropout_mask(n, d_, rng);
      if (lc.drop_mlp.size()) z.array() *= lc.drop_mlp.array();
      h += z;
    }
    c.h_last = h;
    layer_norm(h, lay_.lnf_g, lay_.lnf_b, c.hf, c.xhatf, c.rstdf);
  }

  // Accumulates parameter gradients into `grad` (same layout as weights)
  // given dLoss/dhf.
  void backward(const Cache<T>& c, const MatX<T>& dhf, T* grad) const {
    const auto n = static_cast<Eigen::Index>(c.tokens.size());
    MatX<T> dh;
    layer_norm_backward(dhf, c.xhatf, c.rstdf, lay_.lnf_g, lay_.lnf_b, grad, dh);

    for (int l = cfg_.n_layers - 1; l >= 0; --l) {
      const LayerOffsets& o = lay_.layers[static_cast<std::size_t>(l)];
      const LayerCache<T>& lc = c.layers[static_cast<std::size_t>(l)];

      // MLP branch.
      MatX<T> dz = dh;
      if (lc.drop_mlp.size()) dz.array() *= lc.drop_mlp.array();
      gmat(grad, o.w_proj, cfg_.d_ff, d_).noalias() += lc.g.transpose() * dz;
      grow(grad, o.b_proj, d_) += dz.colwise().sum();
      MatX<T> df = dz * mat(o.w_proj, cfg_.d_ff, d_).transpose();
      df.array() *= gelu_grad(lc.f, lc.tanh_f).array();
      gmat(grad, o.w_fc, d_, cfg_.d_ff).noalias() += lc.m.transpose() * df;
      grow(grad, o.b_fc, cfg_.d_ff) += df.colwise().sum();
      MatX<T> dm = df * mat(o.w_fc, d_, cfg_.d_ff).transpose();
      MatX<T> dx;
      layer_norm_backward(dm, lc.xhat2, lc.rstd2, o.ln2_g, o.ln2_b, grad, dx);
      dh += dx;

      // Attention branch.
      MatX<T> dy = dh;
      if (lc.drop_attn.size()) dy.array() *= lc.drop_attn.array();
      gmat(grad, o.w_out, d_, d_).noalias() += lc.o.transpose() * dy;
      grow(grad, o.b_out, d_) += dy.colwise().sum();
      MatX<T> d_o = dy * mat(o.w_out, d_, d_).transpose();
      MatX<T> dqkv(n, 3 * d_);
      const T scale = T(1) / std::sqrt(static_cast<T>(dh_));
      for (int hd = 0; hd < cfg_.n_heads; ++hd) {
        const auto q = lc.qkv.middleCols(hd * dh_, dh_);
        const auto k = lc.qkv.middleCols(d_ + hd * dh_, dh_);
        const auto v = lc.qkv.middleCols(2 * d_ + hd * dh_, dh_);
        const MatX<T>& p = lc.probs[static_cast<std::size_t>(hd)];
        const auto doh = d_o.middleCols(hd * dh_, dh_);
        MatX<T> dp = doh * v.transpose();
        dqkv.middleCols(2 * d_ + hd * dh_, dh_) = p.transpose() * doh;
        const ColX<T> rowdot = (dp.array() * p.array()).rowwise().sum();
        MatX<T> ds = (p.array() * (dp.array().colwise() - rowdot.array())).matrix();
        dqkv.middleCols(hd * dh_, dh_) = (ds * k) * scale;
        dqkv.middleCols(d_ + hd * dh_, dh_) = (ds.transpose() * q) * scale;
      }
      gmat(grad, o.w_qkv, d_, 3 * d_).noalias() += lc.a.transpose() * dqkv;
      grow(grad, o.b_qkv, 3 * d_) += dqkv.colwise().sum();
      MatX<T> da = dqkv * mat(o.w_qkv, d_, 3 * d_).transpose();
      layer_norm_backward(da, lc.xhat1, lc.rstd1, o.ln1_g, o.ln1_b, grad, dx);
      dh += dx;
    }

    if (c.drop_emb.size()) dh.array() *= c.drop_emb.array();
    auto gwte = gmat(grad, lay_.wte, cfg_.vocab_size, d_);
    auto gwpe = gmat(grad, lay_.wpe, cfg_.context_len, d_);
    for (Eigen::Index i = 0; i < n; ++i) {
      gwte.row(c.tokens[static_cast<std::size_t>(i)]) += dh.row(i);
      gwpe.row(i) += dh.row(i);
    }
  }

  KvCache<T> make_kv() const {
    KvCache<T> kv;
    kv.keys.assign(static_cast<std::size_t>(cfg_.n_layers), MatX<T>(cfg_.context_len, d_));
    kv.values.assign(static_cast<std::size_t>(cfg_.n_layers), MatX<T>(cfg_.context_len, d_));
    return kv;
  }

  // Causal incremental forward of one token at position kv.len; returns the
  // final-normalized hidden row.
  RowX<T> step(TokenId token, KvCache<T>& kv) const {
    const auto pos = static_cast<Eigen::Index>(kv.len);
    RowX<T> h = mat(lay_.wte, cfg_.vocab_size, d_).row(token) + mat(lay_.wpe, cfg_.context_len, d_).row(pos);
    const T scale = T(1) / std::sqrt(static_cast<T>(dh_));
    for (int l = 0; l < cfg_.n_layers; ++l) {
      const LayerOffsets& o = lay_.layers[static_cast<std::size_t>(l)];
      MatX<T>& keys = kv.keys[static_cast<std::size_t>(l)];
      MatX<T>& values = kv.values[static_cast<std::size_t>(l)];
      const RowX<T> a = norm_row(h, o.ln1_g, o.ln1_b);
      RowX<T> qkv = a * mat(o.w_qkv, d_, 3 * d_) + row(o.b_qkv, 3 * d_);
      keys.row(pos) = qkv.segment(d_, d_);
      values.row(pos) = qkv.segment(2 * d_, d_);
      RowX<T> out(d_);
      for (int hd = 0; hd < cfg_.n_heads; ++hd) {
        const auto q = qkv.segment(hd * dh_, dh_);
        const auto k = keys.block(0, hd * dh_, pos + 1, dh_);
        const auto v = values.block(0, hd * dh_, pos + 1, dh_);
        RowX<T> s = (q * k.transpose()) * scale;
        const T mx = s.maxCoeff();
        s = (s.array() - mx).exp().matrix();
        s /= s.sum();
        out.segment(hd * dh_, dh_) = s * v;
      }
      h += out * mat(o.w_out, d_, d_) + row(o.b_out, d_);
      const RowX<T> m = norm_row(h, o.ln2_g, o.ln2_b);
      RowX<T> f = m * mat(o.w_fc, d_, cfg_.d_ff) + row(o.b_fc, cfg_.d_ff);
      RowX<T> tanh_f, g;
      gelu(f, tanh_f, g);
      h += g * mat(o.w_proj, cfg_.d_ff, d_) + row(o.b_proj, d_);
    }
    ++kv.len;
    return norm_row(h, lay_.lnf_g, lay_.lnf_b);
  }

  auto mat(std::size_t off, Eigen::Index rows, Eigen::Index cols) const {
    return Eigen::Map<const MatX<T>>(w_ + off, rows, cols);
  }
  auto row(std::size_t off, Eigen::Index n) const { return Eigen::Map<const RowX<T>>(w_ + off, n); }
  static auto gmat(T* g, std::size_t off, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<MatX<T>>(g + off, rows, cols);
  }
  static auto grow(T* g, std::size_t off, Eigen::Index n) { return Eigen::Map<RowX<T>>(g + off, n); }

  // tanh-approximated GELU; keeps the tanh term for the backward pass.
  template <typename M>
  static void gelu(const M& x, M& tanh_x, M& y) {
    constexpr T k = T(0.7978845608028654);  // sqrt(2/pi)
    const auto v = x.array();
    tanh_x = (k * (v + T(0.044715) * v.cube())).tanh().matrix();
    y = (T(0.5) * v * (T(1) + tanh_x.array())).matrix();
  }
  template <typename M>
  static M gelu_grad(const M& x, const M& tanh_x) {
    constexpr T k = T(0.7978845608028654);
    const auto v = x.array();
    const auto t = tanh_x.array();
    return (T(0.5) * (T(1) + t) + T(0.5) * v * (T(1) - t.square()) * k * (T(1) + T(3 * 0.044715) * v.square()))
        .matrix();
  }

  static void softmax_rows(MatX<T>& s, bool causal) {
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      const Eigen::Index valid = causal ? i + 1 : s.cols();
      auto r = s.row(i);
      const T mx = r.head(valid).maxCoeff();
      r.head(valid) = (r.head(valid).array() - mx).exp().matrix();
      r.head(valid) /= r.head(valid).sum();
      if (valid < s.cols()) r.tail(s.cols() - valid).setZero();
    }
  }

 private:
  MatX<T> dropout_mask(Eigen::Index n, Eigen::Index d, Rng* rng) const {
    if (rng == nullptr || cfg_.dropout <= 0.0) return {};
    MatX<T> mask(n, d);
    const T keep_scale = T(1.0 / (1.0 - cfg_.dropout));
    for (Eigen::Index i = 0; i < mask.size(); ++i) {
      mask.data()[i] = rng->uniform() < cfg_.dropout ? T(0) : keep_scale;
    }
    return mask;
  }

  void layer_norm(const MatX<T>& x, std::size_t g_off, std::size_t b_off, MatX<T>& y, MatX<T>& xhat,
                  ColX<T>& rstd) const {
    const ColX<T> mean = x.rowwise().mean();
    xhat = x.colwise() - mean;
    const ColX<T> var = xhat.array().square().rowwise().mean();
    rstd = (var.array() + kLnEps).rsqrt();
    xhat.array().colwise() *= rstd.array();
    y = xhat.array().rowwise() * row(g_off, d_).array();
    y.rowwise() += row(b_off, d_);
  }

  void layer_norm_backward(const MatX<T>& dy, const MatX<T>& xhat, const ColX<T>& rstd, std::size_t g_off,
                           std::size_t b_off, T* grad, MatX<T>& dx) const {
    grow(grad, g_off, d_) += (dy.array() * xhat.array()).colwise().sum().matrix();
    grow(grad, b_off, d_) += dy.colwise().sum();
    const MatX<T> dxhat = dy.array().rowwise() * row(g_off, d_).array();
    const ColX<T> mean_d = dxhat.rowwise().mean();
    const ColX<T> mean_dx = (dxhat.array() * xhat.array()).rowwise().mean();
    dx = dxhat;
    dx.colwise() -= mean_d;
    dx.array() -= xhat.array().colwise() * mean_dx.array();
    dx.array().colwise() *= rstd.array();
  }

  RowX<T> norm_row(const RowX<T>& x, std::size_t g_off, std::size_t b_off) const {
    const T mean = x.mean();
    RowX<T> xc = x.array() - mean;
    const T rstd = T(1) / std::sqrt(xc.squaredNorm() / static_cast<T>(d_) + kLnEps);
    return (xc.array() * rstd * row(g_off, d_).array()).matrix() + row(b_off, d_);
  }

  const LMConfig& cfg_;
  const Layout& lay_;
  const T* w_;
  Eigen::Index d_;
  Eigen::Index dh_;
};

}  // namespace catgen::detail

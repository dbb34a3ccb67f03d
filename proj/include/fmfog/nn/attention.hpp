// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "fmfog/nn/layers.hpp"

namespace fmfog::nn {

// Scaled dot-product multi-head attention over [B x T x D], scale
// 1/sqrt(D/heads). Heads are packed into contiguous [T x dh] scratch blocks
// so the score/value products run through the gemm kernels.
template <typename T>
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(int64_t d_model, int64_t heads)
      : d_(d_model), h_(heads), dh_(d_model / heads),
        wq_(d_model, d_model), wk_(d_model, d_model), wv_(d_model, d_model), wo_(d_model, d_model) {
    if (d_model % heads != 0) throw ConfigError("attention: d_model not divisible by heads");
  }

  void init(Rng& rng) {
    wq_.init(rng);
    wk_.init(rng);
    wv_.init(rng);
    wo_.init(rng);
  }

  // x flattened [B*T x D].
  Tensor<T> forward(const Tensor<T>& x, int64_t batch, int64_t t_len, bool train = true) {
    b_ = batch;
    t_ = t_len;
    q_ = wq_.forward(x, train);
    k_ = wk_.forward(x, train);
    v_ = wv_.forward(x, train);
    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh_)));

    probs_.assign(static_cast<size_t>(b_ * h_), Tensor<T>());
    Tensor<T> ctx({b_ * t_, d_});
    std::vector<T> qh(t_ * dh_), kh(t_ * dh_), vh(t_ * dh_), oh(t_ * dh_);
    for (int64_t b = 0; b < b_; ++b) {
      for (int64_t h = 0; h < h_; ++h) {
        pack_head(q_, b, h, qh.data());
        pack_head(k_, b, h, kh.data());
        pack_head(v_, b, h, vh.data());
        Tensor<T> scores({t_, t_});
        kern::gemm_bt(t_, t_, dh_, qh.data(), kh.data(), scores.data(), false);
        kern::scale(t_ * t_, scale, scores.data());
        softmax_rows(scores);
        kern::gemm(t_, t_, dh_, scores.data(), vh.data(), oh.data(), false);
        unpack_head(oh.data(), b, h, ctx);
        probs_[static_cast<size_t>(b * h_ + h)] = std::move(scores);
      }
    }
    return wo_.forward(ctx, train);
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const Tensor<T> dctx = wo_.backward(dy);
    Tensor<T> dq({b_ * t_, d_}), dk({b_ * t_, d_}), dv({b_ * t_, d_});
    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh_)));

    std::vector<T> qh(t_ * dh_), kh(t_ * dh_), vh(t_ * dh_), doh(t_ * dh_);
    std::vector<T> dqh(t_ * dh_), dkh(t_ * dh_), dvh(t_ * dh_);
    Tensor<T> dprobs({t_, t_});
    for (int64_t b = 0; b < b_; ++b) {
      for (int64_t h = 0; h < h_; ++h) {
        const Tensor<T>& p = probs_[static_cast<size_t>(b * h_ + h)];
        pack_head(q_, b, h, qh.data());
        pack_head(k_, b, h, kh.data());
        pack_head(v_, b, h, vh.data());
        pack_head(dctx, b, h, doh.data());
        // dV = P^T * dO ; dP = dO * V^T
        kern::gemm_at(t_, t_, dh_, p.data(), doh.data(), dvh.data(), false);
        kern::gemm_bt(t_, t_, dh_, doh.data(), vh.data(), dprobs.data(), false);
        // softmax backward: dS = P .* (dP - rowsum(dP .* P)), then score scale.
        for (int64_t i = 0; i < t_; ++i) {
          double row_dot = 0.0;
          for (int64_t j = 0; j < t_; ++j) row_dot += dprobs.at(i, j) * p.at(i, j);
          for (int64_t j = 0; j < t_; ++j) {
            dprobs.at(i, j) = static_cast<T>(p.at(i, j) * (dprobs.at(i, j) - row_dot)) * scale;
          }
        }
        // dQ = dS * K ; dK = dS^T * Q
        kern::gemm(t_, t_, dh_, dprobs.data(), kh.data(), dqh.data(), false);
        kern::gemm_at(t_, t_, dh_, dprobs.data(), qh.data(), dkh.data(), false);
        unpack_head(dqh.data(), b, h, dq);
        unpack_head(dkh.data(), b, h, dk);
        unpack_head(dvh.data(), b, h, dv);
      }
    }
    Tensor<T> dx = wq_.backward(dq);
    kern::add(dx.size(), wk_.backward(dk).data(), dx.data());
    kern::add(dx.size(), wv_.backward(dv).data(), dx.data());
    return dx;
  }

  void params(ParamRegistry<T>& r, const std::string& prefix) {
    wq_.params(r, prefix + ".wq");
    wk_.params(r, prefix + ".wk");
    wv_.params(r, prefix + ".wv");
    wo_.params(r, prefix + ".wo");
  }

  // Attention probabilities of the last forward, for inspection in tests.
  const Tensor<T>& last_probs(int64_t b, int64_t h) const {
    return probs_[static_cast<size_t>(b * h_ + h)];
  }

 private:
  void pack_head(const Tensor<T>& src, int64_t b, int64_t h, T* dst) const {
    for (int64_t t = 0; t < t_; ++t) {
      const T* row = src.data() + (b * t_ + t) * d_ + h * dh_;
      for (int64_t j = 0; j < dh_; ++j) dst[t * dh_ + j] = row[j];
    }
  }

  void unpack_head(const T* src, int64_t b, int64_t h, Tensor<T>& dst) const {
    for (int64_t t = 0; t < t_; ++t) {
      T* row = dst.data() + (b * t_ + t) * d_ + h * dh_;
      for (int64_t j = 0; j < dh_; ++j) row[j] = src[t * dh_ + j];
    }
  }

  static void softmax_rows(Tensor<T>& m) {
    const int64_t rows = m.dim(0), cols = m.dim(1);
    for (int64_t i = 0; i < rows; ++i) {
      T* row = m.data() + i * cols;
      T mx = row[0];
      for (int64_t j = 1; j < cols; ++j) mx = row[j] > mx ? row[j] : mx;
      double sum = 0.0;
      for (int64_t j = 0; j < cols; ++j) {
        const double e = std::exp(static_cast<double>(row[j] - mx));
        row[j] = static_cast<T>(e);
        sum += e;
      }
      const T inv = static_cast<T>(1.0 / sum);
      for (int64_t j = 0; j < cols; ++j) row[j] *= inv;
    }
  }

  int64_t d_ = 0, h_ = 0, dh_ = 0;
  Linear<T> wq_, wk_, wv_, wo_;
  int64_t b_ = 0, t_ = 0;
  Tensor<T> q_, k_, v_;
  std::vector<Tensor<T>> probs_;
};

// Pre-norm transformer block: z = x + Drop(MHA(LN1(x))),
// y = z + Drop(FFN(LN2(z))); the FFN is D -> Dff -> D with ReLU.
template <typename T>
class TransformerBlock {
 public:
  TransformerBlock() = default;
  TransformerBlock(int64_t d_model, int64_t heads, int64_t d_ff, double dropout)
      : ln1_(d_model), ln2_(d_model), attn_(d_model, heads),
        ff1_(d_model, d_ff), ff2_(d_ff, d_model), drop1_(dropout), drop2_(dropout) {}

  void init(Rng& rng) {
    attn_.init(rng);
    ff1_.init(rng);
    ff2_.init(rng);
  }

  Tensor<T> forward(const Tensor<T>& x, int64_t batch, int64_t t_len, bool train, Rng& rng) {
    Tensor<T> a = attn_.forward(ln1_.forward(x, train), batch, t_len, train);
    a = drop1_.forward(a, train, rng);
    Tensor<T> z = x;
    kern::add(z.size(), a.data(), z.data());

    Tensor<T> f = ff1_.forward(ln2_.forward(z, train), train);
    if (train) ff_pre_ = f;
    Tensor<T> fr(f.shape());
    kern::relu(f.size(), f.data(), fr.data());
    Tensor<T> g = ff2_.forward(fr, train);
    g = drop2_.forward(g, train, rng);
    kern::add(z.size(), g.data(), z.data());
    return z;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    // FFN branch
    Tensor<T> dg = drop2_.backward(dy);
    Tensor<T> dfr = ff2_.backward(dg);
    Tensor<T> df(dfr.shape());
    kern::relu_backward(df.size(), ff_pre_.data(), dfr.data(), df.data());
    Tensor<T> dz = ln2_.backward(ff1_.backward(df));
    kern::add(dz.size(), dy.data(), dz.data());  // residual

    // attention branch
    Tensor<T> da = drop1_.backward(dz);
    Tensor<T> dx = ln1_.backward(attn_.backward(da));
    kern::add(dx.size(), dz.data(), dx.data());  // residual
    return dx;
  }

  void params(ParamRegistry<T>& r, const std::string& prefix) {
    ln1_.params(r, prefix + ".ln1");
    attn_.params(r, prefix + ".attn");
    ln2_.params(r, prefix + ".ln2");
    ff1_.params(r, prefix + ".ff1");
    ff2_.params(r, prefix + ".ff2");
  }

  MultiHeadAttention<T>& attention() { return attn_; }

 private:
  LayerNorm<T> ln1_, ln2_;
  MultiHeadAttention<T> attn_;
  Linear<T> ff1_, ff2_;
  Dropout<T> drop1_, drop2_;
  Tensor<T> ff_pre_;
};

}  // namespace fmfog::nn

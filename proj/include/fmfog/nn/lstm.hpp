// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fmfog/nn/layers.hpp"

namespace fmfog::nn {

// Stacked LSTM over [B x T x Din] with zero initial state and full BPTT.
// Gate packing is [input | forget | cell | output]; the forget-gate bias is
// initialized to +1.
template <typename T>
class Lstm {
 public:
  Lstm() = default;
  Lstm(int64_t din, int64_t hidden, int64_t layers) : din_(din), h_(hidden) {
    for (int64_t l = 0; l < layers; ++l) {
      const int64_t in = (l == 0) ? din : hidden;
      layers_.push_back(LayerParams{Param<T>({in, 4 * hidden}), Param<T>({hidden, 4 * hidden}),
                                    Param<T>({4 * hidden})});
    }
  }

  void init(Rng& rng) {
    for (auto& lp : layers_) {
      glorot_init(lp.wx.value, lp.wx.value.dim(0), 4 * h_, rng);
      glorot_init(lp.wh.value, h_, 4 * h_, rng);
      lp.b.value.zero();
      for (int64_t j = 0; j < h_; ++j) lp.b.value[h_ + j] = T(1);  // forget gate
    }
  }

  // Returns outputs [B x T x H] of the top layer; last_hidden() gives the
  // final h per layer.
  Tensor<T> forward(const Tensor<T>& x, bool train = true) {
    const int64_t batch = x.dim(0);
    t_len_ = x.dim(1);
    b_ = batch;
    const size_t n_layers = layers_.size();
    caches_.assign(n_layers, LayerCache{});
    last_h_.assign(n_layers, Tensor<T>({batch, h_}));

    Tensor<T> in = x;
    for (size_t l = 0; l < n_layers; ++l) {
      LayerCache& cc = caches_[l];
      const int64_t din = layers_[l].wx.value.dim(0);
      if (train) {
        cc.input = in;
        cc.gates = Tensor<T>({t_len_, batch, 4 * h_});
        cc.cells = Tensor<T>({t_len_, batch, h_});
        cc.tanhc = Tensor<T>({t_len_, batch, h_});
      }
      Tensor<T> out({batch, t_len_, h_});
      Tensor<T> h_prev({batch, h_}), c_prev({batch, h_});
      Tensor<T> xt({batch, din}), gates({batch, 4 * h_});
      for (int64_t t = 0; t < t_len_; ++t) {
        for (int64_t bb = 0; bb < batch; ++bb) {
          const T* src = in.data() + (bb * t_len_ + t) * din;
          std::copy(src, src + din, xt.data() + bb * din);
        }
        kern::gemm(batch, din, 4 * h_, xt.data(), layers_[l].wx.value.data(), gates.data(), false);
        kern::gemm(batch, h_, 4 * h_, h_prev.data(), layers_[l].wh.value.data(), gates.data(),
                   true);
        for (int64_t bb = 0; bb < batch; ++bb) {
          kern::add(4 * h_, layers_[l].b.value.data(), gates.data() + bb * 4 * h_);
        }
        for (int64_t bb = 0; bb < batch; ++bb) {
          T* g = gates.data() + bb * 4 * h_;
          T* cp = c_prev.data() + bb * h_;
          T* hp = h_prev.data() + bb * h_;
          for (int64_t j = 0; j < h_; ++j) {
            const T gi = sigmoid(g[j]);
            const T gf = sigmoid(g[h_ + j]);
            const T gc = static_cast<T>(std::tanh(static_cast<double>(g[2 * h_ + j])));
            const T go = sigmoid(g[3 * h_ + j]);
            const T c = gf * cp[j] + gi * gc;
            const T tc = static_cast<T>(std::tanh(static_cast<double>(c)));
            const T hh = go * tc;
            g[j] = gi;
            g[h_ + j] = gf;
            g[2 * h_ + j] = gc;
            g[3 * h_ + j] = go;
            cp[j] = c;
            hp[j] = hh;
            out.at(bb, t, j) = hh;
          }
          if (train) {
            std::copy(g, g + 4 * h_, cc.gates.data() + (t * batch + bb) * 4 * h_);
            std::copy(cp, cp + h_, cc.cells.data() + (t * batch + bb) * h_);
            T* tcd = cc.tanhc.data() + (t * batch + bb) * h_;
            for (int64_t j = 0; j < h_; ++j) {
              tcd[j] = static_cast<T>(std::tanh(static_cast<double>(cp[j])));
            }
          }
        }
      }
      last_h_[l] = h_prev;
      in = out;
    }
    return in;
  }

  // dy [B x T x H] w.r.t. the top-layer outputs; returns d(input).
  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dout = dy;
    for (int64_t l = static_cast<int64_t>(layers_.size()) - 1; l >= 0; --l) {
      dout = backward_layer(static_cast<size_t>(l), dout);
    }
    return dout;
  }

  void params(ParamRegistry<T>& r, const std::string& prefix) {
    for (size_t l = 0; l < layers_.size(); ++l) {
      const std::string p = prefix + ".l" + std::to_string(l);
      reg(r, p + ".wx", layers_[l].wx);
      reg(r, p + ".wh", layers_[l].wh);
      reg(r, p + ".b", layers_[l].b);
    }
  }

  const Tensor<T>& last_hidden(size_t layer) const { return last_h_[layer]; }
  int64_t hidden_size() const { return h_; }

 private:
  struct LayerParams {
    Param<T> wx, wh, b;
  };
  struct LayerCache {
    Tensor<T> input;  // [B x T x Din]
    Tensor<T> gates;  // [T x B x 4H] post-activation
    Tensor<T> cells;  // [T x B x H]
    Tensor<T> tanhc;  // [T x B x H]
  };

  static T sigmoid(T v) { return static_cast<T>(1.0 / (1.0 + std::exp(-static_cast<double>(v)))); }

  Tensor<T> backward_layer(size_t l, const Tensor<T>& dout) {
    LayerParams& lp = layers_[l];
    LayerCache& cc = caches_[l];
    const int64_t din = lp.wx.value.dim(0);
    Tensor<T> din_grad({b_, t_len_, din});
    Tensor<T> dh({b_, h_}), dc({b_, h_});
    Tensor<T> dgates({b_, 4 * h_});
    Tensor<T> xt({b_, din}), hprev({b_, h_});
    for (int64_t t = t_len_ - 1; t >= 0; --t) {
      // dh accumulates the output gradient plus the recurrent term.
      for (int64_t bb = 0; bb < b_; ++bb) {
        for (int64_t j = 0; j < h_; ++j) dh.at(bb, j) += dout.at(bb, t, j);
      }
      for (int64_t bb = 0; bb < b_; ++bb) {
        const T* g = cc.gates.data() + (t * b_ + bb) * 4 * h_;
        const T* tc = cc.tanhc.data() + (t * b_ + bb) * h_;
        const T* cprev =
            (t == 0) ? nullptr : cc.cells.data() + ((t - 1) * b_ + bb) * h_;
        T* dgb = dgates.data() + bb * 4 * h_;
        for (int64_t j = 0; j < h_; ++j) {
          const T gi = g[j], gf = g[h_ + j], gc = g[2 * h_ + j], go = g[3 * h_ + j];
          const T dhj = dh.at(bb, j);
          const T dcj = dhj * go * (T(1) - tc[j] * tc[j]) + dc.at(bb, j);
          const T cp = cprev ? cprev[j] : T(0);
          dgb[j] = dcj * gc * gi * (T(1) - gi);               // input gate pre-act
          dgb[h_ + j] = dcj * cp * gf * (T(1) - gf);          // forget gate pre-act
          dgb[2 * h_ + j] = dcj * gi * (T(1) - gc * gc);      // cell candidate pre-act
          dgb[3 * h_ + j] = dhj * tc[j] * go * (T(1) - go);   // output gate pre-act
          dc.at(bb, j) = dcj * gf;
        }
      }
      // Parameter gradients and propagated gradients.
      for (int64_t bb = 0; bb < b_; ++bb) {
        const T* src = cc.input.data() + (bb * t_len_ + t) * din;
        std::copy(src, src + din, xt.data() + bb * din);
        if (t > 0) {
          // previous hidden state: recompute from gates/tanhc cache
          const T* gp = cc.gates.data() + ((t - 1) * b_ + bb) * 4 * h_;
          const T* tcp = cc.tanhc.data() + ((t - 1) * b_ + bb) * h_;
          T* hp = hprev.data() + bb * h_;
          for (int64_t j = 0; j < h_; ++j) hp[j] = gp[3 * h_ + j] * tcp[j];
        }
      }
      if (t == 0) hprev.zero();
      kern::gemm_at(b_, din, 4 * h_, xt.data(), dgates.data(), lp.wx.grad.data(), true);
      kern::gemm_at(b_, h_, 4 * h_, hprev.data(), dgates.data(), lp.wh.grad.data(), true);
      for (int64_t bb = 0; bb < b_; ++bb) {
        kern::add(4 * h_, dgates.data() + bb * 4 * h_, lp.b.grad.data());
      }
      Tensor<T> dxt({b_, din});
      kern::gemm_bt(b_, din, 4 * h_, dgates.data(), lp.wx.value.data(), dxt.data(), false);
      Tensor<T> dhprev({b_, h_});
      kern::gemm_bt(b_, h_, 4 * h_, dgates.data(), lp.wh.value.data(), dhprev.data(), false);
      for (int64_t bb = 0; bb < b_; ++bb) {
        for (int64_t j = 0; j < din; ++j) din_grad.at(bb, t, j) = dxt.at(bb, j);
      }
      dh = dhprev;
    }
    return din_grad;
  }

  int64_t din_ = 0, h_ = 0;
  int64_t b_ = 0, t_len_ = 0;
  std::vector<LayerParams> layers_;
  std::vector<LayerCache> caches_;
  std::vector<Tensor<T>> last_h_;
};

}  // namespace fmfog::nn

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "fmfog/nn/layers.hpp"

namespace fmfog::nn {

// 1-D cross-correlation over [B x Cin x T] with "same" padding (left pad
// (K-1)/2, right pad the remainder), stride 1, via im2col + gemm.
template <typename T>
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(int64_t cin, int64_t cout, int64_t k)
      : cin_(cin), cout_(cout), k_(k), w_({cout, cin * k}), b_({cout}) {}

  void init(Rng& rng) { glorot_init(w_.value, cin_ * k_, cout_, rng); }

  Tensor<T> forward(const Tensor<T>& x, bool train = true) {
    const int64_t batch = x.dim(0), t_len = x.dim(2);
    if (x.dim(1) != cin_) throw ShapeError("conv1d: channel mismatch");
    if (k_ > t_len) throw ShapeError("conv1d: kernel longer than sequence");
    t_ = t_len;
    const int64_t ck = cin_ * k_;
    if (train) cols_cache_.assign(static_cast<size_t>(batch * ck * t_len), T(0));
    Tensor<T> y({batch, cout_, t_len});
    std::vector<T> cols(static_cast<size_t>(ck * t_len));
    for (int64_t b = 0; b < batch; ++b) {
      im2col(x.data() + b * cin_ * t_len, cols.data());
      if (train) {
        std::copy(cols.begin(), cols.end(), cols_cache_.begin() + b * ck * t_len);
      }
      T* yb = y.data() + b * cout_ * t_len;
      kern::gemm(cout_, ck, t_len, w_.value.data(), cols.data(), yb, false);
      for (int64_t co = 0; co < cout_; ++co) {
        const T bias = b_.value[co];
        for (int64_t t = 0; t < t_len; ++t) yb[co * t_len + t] += bias;
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const int64_t batch = dy.dim(0), t_len = dy.dim(2);
    const int64_t ck = cin_ * k_;
    Tensor<T> dx({batch, cin_, t_len});
    std::vector<T> dcols(static_cast<size_t>(ck * t_len));
    for (int64_t b = 0; b < batch; ++b) {
      const T* dyb = dy.data() + b * cout_ * t_len;
      const T* cols = cols_cache_.data() + b * ck * t_len;
      kern::gemm_bt(cout_, ck, t_len, dyb, cols, w_.grad.data(), true);
      for (int64_t co = 0; co < cout_; ++co) {
        for (int64_t t = 0; t < t_len; ++t) b_.grad[co] += dyb[co * t_len + t];
      }
      kern::gemm_at(cout_, ck, t_len, w_.value.data(), dyb, dcols.data(), false);
      col2im(dcols.data(), dx.data() + b * cin_ * t_len);
    }
    return dx;
  }

  void params(ParamRegistry<T>& r, const std::string& prefix) {
    reg(r, prefix + ".w", w_);
    reg(r, prefix + ".b", b_);
  }

  Param<T>& weight() { return w_; }
  Param<T>& bias() { return b_; }
  int64_t pad_left() const { return (k_ - 1) / 2; }

 private:
  void im2col(const T* x, T* cols) const {
    const int64_t left = pad_left();
    for (int64_t ci = 0; ci < cin_; ++ci) {
      for (int64_t kk = 0; kk < k_; ++kk) {
        T* row = cols + (ci * k_ + kk) * t_;
        const int64_t off = kk - left;
        for (int64_t t = 0; t < t_; ++t) {
          const int64_t src = t + off;
          row[t] = (src >= 0 && src < t_) ? x[ci * t_ + src] : T(0);
        }
      }
    }
  }

  void col2im(const T* dcols, T* dx) const {
    const int64_t left = pad_left();
    for (int64_t ci = 0; ci < cin_; ++ci) {
      for (int64_t kk = 0; kk < k_; ++kk) {
        const T* row = dcols + (ci * k_ + kk) * t_;
        const int64_t off = kk - left;
        for (int64_t t = 0; t < t_; ++t) {
          const int64_t dst = t + off;
          if (dst >= 0 && dst < t_) dx[ci * t_ + dst] += row[t];
        }
      }
    }
  }

  int64_t cin_ = 0, cout_ = 0, k_ = 0, t_ = 0;
  Param<T> w_, b_;
  std::vector<T> cols_cache_;
};

// Width-2, stride-2 max pool over the time axis; the first maximal index
// receives the gradient.
template <typename T>
class MaxPool1d {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool train = true) {
    const int64_t batch = x.dim(0), ch = x.dim(1), t_len = x.dim(2);
    const int64_t t_out = t_len / 2;
    in_t_ = t_len;
    Tensor<T> y({batch, ch, t_out});
    if (train) argmax_.assign(static_cast<size_t>(batch * ch * t_out), 0);
    for (int64_t bc = 0; bc < batch * ch; ++bc) {
      const T* row = x.data() + bc * t_len;
      T* out = y.data() + bc * t_out;
      for (int64_t t = 0; t < t_out; ++t) {
        const int64_t a = 2 * t;
        const bool first = row[a] >= row[a + 1];
        out[t] = first ? row[a] : row[a + 1];
        if (train) argmax_[static_cast<size_t>(bc * t_out + t)] = first ? a : a + 1;
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const int64_t batch = dy.dim(0), ch = dy.dim(1), t_out = dy.dim(2);
    Tensor<T> dx({batch, ch, in_t_});
    for (int64_t bc = 0; bc < batch * ch; ++bc) {
      const T* drow = dy.data() + bc * t_out;
      T* out = dx.data() + bc * in_t_;
      for (int64_t t = 0; t < t_out; ++t) {
        out[argmax_[static_cast<size_t>(bc * t_out + t)]] += drow[t];
      }
    }
    return dx;
  }

 private:
  int64_t in_t_ = 0;
  std::vector<int64_t> argmax_;
};

}  // namespace fmfog::nn

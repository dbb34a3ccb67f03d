// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fmfog/core/kernels.hpp"
#include "fmfog/core/rng.hpp"
#include "fmfog/core/tensor.hpp"

namespace fmfog::nn {

// Named parameter registry; registration order defines checkpoint and
// optimizer order.
template <typename T>
using ParamRegistry = std::vector<std::pair<std::string, Param<T>*>>;

template <typename T>
void reg(ParamRegistry<T>& r, const std::string& name, Param<T>& p) {
  r.emplace_back(name, &p);
}

// Uniform(+-sqrt(6/(fan_in+fan_out))) a.k.a. Glorot; biases stay zero.
template <typename T>
void glorot_init(Tensor<T>& w, int64_t fan_in, int64_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (int64_t i = 0; i < w.size(); ++i) w[i] = static_cast<T>(rng.uniform(-limit, limit));
}

template <typename T>
void normal_init(Tensor<T>& w, double stddev, Rng& rng) {
  for (int64_t i = 0; i < w.size(); ++i) w[i] = static_cast<T>(rng.normal() * stddev);
}

// y[M x Dout] = x[M x Din] * W + b. Callers flatten leading dims into M.
template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(int64_t din, int64_t dout) : din_(din), dout_(dout), w_({din, dout}), b_({dout}) {}

  void init(Rng& rng) { glorot_init(w_.value, din_, dout_, rng); }

  Tensor<T> forward(const Tensor<T>& x, bool train = true) {
    const int64_t m = x.size() / din_;
    if (x.size() % din_ != 0) throw ShapeError("linear: input width mismatch");
    if (train) x_cache_ = x;
    Tensor<T> y({m, dout_});
    kern::gemm(m, din_, dout_, x.data(), w_.value.data(), y.data(), false);
    for (int64_t i = 0; i < m; ++i) kern::add(dout_, b_.value.data(), y.data() + i * dout_);
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const int64_t m = dy.size() / dout_;
    kern::gemm_at(m, din_, dout_, x_cache_.data(), dy.data(), w_.grad.data(), true);
    for (int64_t i = 0; i < m; ++i) kern::add(dout_, dy.data() + i * dout_, b_.grad.data());
    Tensor<T> dx({m, din_});
    kern::gemm_bt(m, din_, dout_, dy.data(), w_.value.data(), dx.data(), false);
    return dx;
  }

  void params(ParamRegistry<T>& r, const std::string& prefix) {
    reg(r, prefix + ".w", w_);
    reg(r, prefix + ".b", b_);
  }

  Param<T>& weight() { return w_; }
  Param<T>& bias() { return b_; }
  int64_t in_features() const { return din_; }
  int64_t out_features() const { return dout_; }

 private:
  int64_t din_ = 0, dout_ = 0;
  Param<T> w_, b_;
  Tensor<T> x_cache_;
};

// Normalizes over the last dimension; affine gamma/beta.
template <typename T>
class LayerNorm {
 public:
  LayerNorm() = default;
  explicit LayerNorm(int64_t dim) : dim_(dim), gamma_({dim}), beta_({dim}) {
    gamma_.value.fill(T(1));
  }

  Tensor<T> forward(const Tensor<T>& x, bool train = true) {
    const int64_t m = x.size() / dim_;
    Tensor<T> y({m, dim_});
    if (train) {
      xhat_ = Tensor<T>({m, dim_});
      rstd_ = Tensor<T>({m});
    }
    for (int64_t i = 0; i < m; ++i) {
      const T* row = x.data() + i * dim_;
      double mean = 0.0;
      for (int64_t j = 0; j < dim_; ++j) mean += row[j];
      mean /= static_cast<double>(dim_);
      double var = 0.0;
      for (int64_t j = 0; j < dim_; ++j) {
        const double d = row[j] - mean;
        var += d * d;
      }
      var /= static_cast<double>(dim_);
      const double rstd = 1.0 / std::sqrt(var + 1e-5);
      if (train) rstd_[i] = static_cast<T>(rstd);
      for (int64_t j = 0; j < dim_; ++j) {
        const T xh = static_cast<T>((row[j] - mean) * rstd);
        if (train) xhat_.at(i, j) = xh;
        y.at(i, j) = gamma_.value[j] * xh + beta_.value[j];
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const int64_t m = dy.size() / dim_;
    Tensor<T> dx({m, dim_});
    const double inv_d = 1.0 / static_cast<double>(dim_);
    for (int64_t i = 0; i < m; ++i) {
      double sum_dyh = 0.0, sum_dyh_xh = 0.0;
      for (int64_t j = 0; j < dim_; ++j) {
        const double dyh = static_cast<double>(dy.at(i, j)) * gamma_.value[j];
        sum_dyh += dyh;
        sum_dyh_xh += dyh * xhat_.at(i, j);
        gamma_.grad[j] += dy.at(i, j) * xhat_.at(i, j);
        beta_.grad[j] += dy.at(i, j);
      }
      for (int64_t j = 0; j < dim_; ++j) {
        const double dyh = static_cast<double>(dy.at(i, j)) * gamma_.value[j];
        dx.at(i, j) = static_cast<T>(rstd_[i] * (dyh - inv_d * sum_dyh - xhat_.at(i, j) * inv_d * sum_dyh_xh));
      }
    }
    return dx;
  }

  void params(ParamRegistry<T>& r, const std::string& prefix) {
    reg(r, prefix + ".gamma", gamma_);
    reg(r, prefix + ".beta", beta_);
  }

 private:
  int64_t dim_ = 0;
  Param<T> gamma_, beta_;
  Tensor<T> xhat_;
  Tensor<T> rstd_;
};

// Inverted dropout; identity at eval time or at rate 0.
template <typename T>
class Dropout {
 public:
  Dropout() = default;
  explicit Dropout(double rate) : rate_(rate) {}

  Tensor<T> forward(const Tensor<T>& x, bool train, Rng& rng) {
    if (!train || rate_ <= 0.0) {
      active_ = false;
      return x;
    }
    active_ = true;
    const T keep_scale = static_cast<T>(1.0 / (1.0 - rate_));
    mask_ = Tensor<T>(x.shape());
    Tensor<T> y(x.shape());
    for (int64_t i = 0; i < x.size(); ++i) {
      const bool keep = rng.uniform() >= rate_;
      mask_[i] = keep ? keep_scale : T(0);
      y[i] = x[i] * mask_[i];
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    if (!active_) return dy;
    Tensor<T> dx(dy.shape());
    for (int64_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * mask_[i];
    return dx;
  }

  double rate() const { return rate_; }

 private:
  double rate_ = 0.0;
  bool active_ = false;
  Tensor<T> mask_;
};

// Learned lookup table; gradient accumulates only into selected rows.
template <typename T>
class Embedding {
 public:
  Embedding() = default;
  Embedding(int64_t rows, int64_t dim) : rows_(rows), dim_(dim), table_({rows, dim}) {}

  void init(Rng& rng) { normal_init(table_.value, 0.02, rng); }

  Tensor<T> forward(const std::vector<int>& ids, bool train = true) {
    if (train) ids_cache_ = ids;
    Tensor<T> y({static_cast<int64_t>(ids.size()), dim_});
    for (size_t b = 0; b < ids.size(); ++b) {
      const int id = ids[b];
      if (id < 0 || id >= rows_) {
        throw IndexError("embedding: id " + std::to_string(id) + " out of range [0," +
                         std::to_string(rows_ - 1) + "]");
      }
      for (int64_t j = 0; j < dim_; ++j) y.at(static_cast<int64_t>(b), j) = table_.value.at(id, j);
    }
    return y;
  }

  void backward(const Tensor<T>& dy) {
    for (size_t b = 0; b < ids_cache_.size(); ++b) {
      const int id = ids_cache_[b];
      for (int64_t j = 0; j < dim_; ++j) {
        table_.grad.at(id, j) += dy.at(static_cast<int64_t>(b), j);
      }
    }
  }

  void params(ParamRegistry<T>& r, const std::string& prefix) { reg(r, prefix, table_); }

  Param<T>& table() { return table_; }
  int64_t rows() const { return rows_; }
  int64_t dim() const { return dim_; }

 private:
  int64_t rows_ = 0, dim_ = 0;
  Param<T> table_;
  std::vector<int> ids_cache_;
};

// Fixed sine/cosine positional encoding [T x D]; position 0 row is
// (0, 1, 0, 1, ...).
template <typename T>
Tensor<T> sinusoidal_positional(int64_t t_len, int64_t d_model) {
  Tensor<T> pe({t_len, d_model});
  for (int64_t t = 0; t < t_len; ++t) {
    for (int64_t i = 0; i < d_model; i += 2) {
      const double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(d_model));
      pe.at(t, i) = static_cast<T>(std::sin(t * freq));
      if (i + 1 < d_model) pe.at(t, i + 1) = static_cast<T>(std::cos(t * freq));
    }
  }
  return pe;
}

}  // namespace fmfog::nn

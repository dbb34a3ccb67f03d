// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fmfog/core/error.hpp"
#include "fmfog/core/tensor.hpp"

namespace fmfog::nn {

template <typename T>
struct LossResult {
  double loss = 0.0;
  Tensor<T> grad;  // d(loss)/d(pred or logits)
};

// Mean squared error over masked timesteps x present channels only.
// pred/target [B x T x C], timestep mask [B x T], channel mask [B x C].
template <typename T>
LossResult<T> masked_mse(const Tensor<T>& pred, const Tensor<T>& target,
                         const std::vector<uint8_t>& mask,
                         const std::vector<uint8_t>& chan_mask) {
  const int64_t batch = pred.dim(0), t_len = pred.dim(1), ch = pred.dim(2);
  int64_t count = 0;
  for (int64_t b = 0; b < batch; ++b) {
    int64_t masked_t = 0, present_c = 0;
    for (int64_t t = 0; t < t_len; ++t) masked_t += mask[static_cast<size_t>(b * t_len + t)] ? 1 : 0;
    for (int64_t c = 0; c < ch; ++c) present_c += chan_mask[static_cast<size_t>(b * ch + c)] ? 1 : 0;
    count += masked_t * present_c;
  }
  if (count == 0) throw DegenerateInputError("masked_mse: mask selects no elements");

  LossResult<T> r;
  r.grad = Tensor<T>(pred.shape());
  double sum = 0.0;
  const double inv = 1.0 / static_cast<double>(count);
  for (int64_t b = 0; b < batch; ++b) {
    for (int64_t t = 0; t < t_len; ++t) {
      if (!mask[static_cast<size_t>(b * t_len + t)]) continue;
      for (int64_t c = 0; c < ch; ++c) {
        if (!chan_mask[static_cast<size_t>(b * ch + c)]) continue;
        const double d = static_cast<double>(pred.at(b, t, c)) - target.at(b, t, c);
        sum += d * d;
        r.grad.at(b, t, c) = static_cast<T>(2.0 * d * inv);
      }
    }
  }
  r.loss = sum * inv;
  return r;
}

// Row-wise softmax of logits [B x C].
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  const int64_t batch = logits.dim(0), c = logits.dim(1);
  Tensor<T> p(logits.shape());
  for (int64_t b = 0; b < batch; ++b) {
    const T* row = logits.data() + b * c;
    T mx = row[0];
    for (int64_t j = 1; j < c; ++j) mx = row[j] > mx ? row[j] : mx;
    double sum = 0.0;
    for (int64_t j = 0; j < c; ++j) sum += std::exp(static_cast<double>(row[j] - mx));
    for (int64_t j = 0; j < c; ++j) {
      p.at(b, j) = static_cast<T>(std::exp(static_cast<double>(row[j] - mx)) / sum);
    }
  }
  return p;
}

// Softmax + NLL, mean over the batch; labels are class indices.
template <typename T>
LossResult<T> cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels) {
  const int64_t batch = logits.dim(0), c = logits.dim(1);
  if (static_cast<int64_t>(labels.size()) != batch) {
    throw ShapeError("cross_entropy: label count mismatch");
  }
  Tensor<T> p = softmax(logits);
  LossResult<T> r;
  r.grad = Tensor<T>(logits.shape());
  double sum = 0.0;
  const double inv = 1.0 / static_cast<double>(batch);
  for (int64_t b = 0; b < batch; ++b) {
    const int y = labels[static_cast<size_t>(b)];
    if (y < 0 || y >= c) throw IndexError("cross_entropy: label out of range");
    const double py = std::max(static_cast<double>(p.at(b, y)), 1e-300);
    sum -= std::log(py);
    for (int64_t j = 0; j < c; ++j) {
      r.grad.at(b, j) = static_cast<T>((static_cast<double>(p.at(b, j)) - (j == y ? 1.0 : 0.0)) * inv);
    }
  }
  r.loss = sum * inv;
  return r;
}

}  // namespace fmfog::nn

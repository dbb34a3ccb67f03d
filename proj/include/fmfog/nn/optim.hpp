// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fmfog/core/tensor.hpp"

namespace fmfog::nn {

// lr(t) = lr_min + 0.5 (lr0 - lr_min)(1 + cos(pi t / T)); lr(0) = lr0,
// lr(T) = lr_min.
inline double cosine_lr(int64_t step, int64_t total_steps, double lr0, double lr_min) {
  if (total_steps <= 0) return lr0;
  const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
  return lr_min + 0.5 * (lr0 - lr_min) * (1.0 + std::cos(3.14159265358979323846 * frac));
}

struct AdamWConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// AdamW with decoupled weight decay and bias-corrected moments. Parameters
// are grouped so backbone and head can run at different learning rates; the
// group learning-rate scale multiplies the scheduler-provided base rate.
template <typename T>
class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

  // lr_scale lets one optimizer drive groups at lr0 * scale.
  void add_group(const std::vector<Param<T>*>& params, double lr_scale = 1.0) {
    for (Param<T>* p : params) {
      slots_.push_back(Slot{p, Tensor<double>(p->value.shape()), Tensor<double>(p->value.shape()),
                            lr_scale});
    }
  }

  void zero_grad() {
    for (auto& s : slots_) s.param->zero_grad();
  }

  // One update with base learning rate lr_base (weight decay from config).
  void step(double lr_base) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (auto& s : slots_) {
      const double lr = lr_base * s.lr_scale;
      T* v = s.param->value.data();
      const T* g = s.param->grad.data();
      for (int64_t i = 0; i < s.param->size(); ++i) {
        const double grad = static_cast<double>(g[i]);
        s.m[i] = cfg_.beta1 * s.m[i] + (1.0 - cfg_.beta1) * grad;
        s.v[i] = cfg_.beta2 * s.v[i] + (1.0 - cfg_.beta2) * grad * grad;
        const double mhat = s.m[i] / bc1;
        const double vhat = s.v[i] / bc2;
        const double update = mhat / (std::sqrt(vhat) + cfg_.eps);
        // decoupled decay: applied to the value, not folded into the gradient
        v[i] = static_cast<T>(static_cast<double>(v[i]) - lr * update -
                              lr * cfg_.weight_decay * static_cast<double>(v[i]));
      }
    }
  }

  int64_t step_count() const { return t_; }
  const AdamWConfig& config() const { return cfg_; }

 private:
  struct Slot {
    Param<T>* param;
    Tensor<double> m, v;
    double lr_scale;
  };

  AdamWConfig cfg_;
  std::vector<Slot> slots_;
  int64_t t_ = 0;
};

}  // namespace fmfog::nn

// SPDX-License-Identifier: Apache-2.0
//
// Scalar reference kernels. These define the numerical contract: the AVX2
// variants must reproduce them bit for bit. Per output element the
// accumulation runs over k (gemm) or i (gemm_at) in ascending order with
// separate multiply and add; -ffp-contract=off keeps the compiler from
// fusing those into FMA.

#include "kernels_detail.hpp"

namespace fmfog::kern::detail {

void gemm_scalar_f32(int64_t i0, int64_t i1, int64_t k, int64_t n, const float* a, const float* b,
                     float* c, bool accumulate) {
  for (int64_t i = i0; i < i1; ++i) {
    float* crow = c + i * n;
    if (!accumulate) {
      for (int64_t j = 0; j < n; ++j) crow[j] = 0.0f;
    }
    const float* arow = a + i * k;
    for (int64_t kk = 0; kk < k; ++kk) {
      const float aik = arow[kk];
      const float* brow = b + kk * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void gemm_at_scalar_f32(int64_t k0, int64_t k1, int64_t m, int64_t k, int64_t n, const float* a,
                        const float* b, float* c, bool accumulate) {
  if (!accumulate) {
    for (int64_t kk = k0; kk < k1; ++kk) {
      float* crow = c + kk * n;
      for (int64_t j = 0; j < n; ++j) crow[j] = 0.0f;
    }
  }
  for (int64_t i = 0; i < m; ++i) {
    const float* arow = a + i * k;
    const float* brow = b + i * n;
    for (int64_t kk = k0; kk < k1; ++kk) {
      const float aik = arow[kk];
      float* crow = c + kk * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void add_scalar_f32(int64_t n, const float* x, float* y) {
  for (int64_t i = 0; i < n; ++i) y[i] += x[i];
}

void axpy_scalar_f32(int64_t n, float a, const float* x, float* y) {
  for (int64_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar_f32(int64_t n, float a, float* x) {
  for (int64_t i = 0; i < n; ++i) x[i] *= a;
}

void relu_scalar_f32(int64_t n, const float* x, float* y) {
  for (int64_t i = 0; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_backward_scalar_f32(int64_t n, const float* x, const float* dy, float* dx) {
  for (int64_t i = 0; i < n; ++i) {
    if (x[i] > 0.0f) dx[i] += dy[i];
  }
}

}  // namespace fmfog::kern::detail

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

// Internal kernel entry points, range-based so the dispatcher can partition
// rows across threads. Scalar versions are the reference; AVX2 versions must
// match them bit for bit (same per-element operation order).
namespace fmfog::kern::detail {

// C rows [i0, i1) of C[M x N] (+)= A[M x K] * B[K x N].
void gemm_scalar_f32(int64_t i0, int64_t i1, int64_t k, int64_t n, const float* a, const float* b,
                     float* c, bool accumulate);
// C rows [k0, k1) of C[K x N] (+)= A^T * B with A[M x K], B[M x N].
void gemm_at_scalar_f32(int64_t k0, int64_t k1, int64_t m, int64_t k, int64_t n, const float* a,
                        const float* b, float* c, bool accumulate);
void add_scalar_f32(int64_t n, const float* x, float* y);
void axpy_scalar_f32(int64_t n, float a, const float* x, float* y);
void scale_scalar_f32(int64_t n, float a, float* x);
void relu_scalar_f32(int64_t n, const float* x, float* y);
void relu_backward_scalar_f32(int64_t n, const float* x, const float* dy, float* dx);

bool avx2_available();
void gemm_avx2_f32(int64_t i0, int64_t i1, int64_t k, int64_t n, const float* a, const float* b,
                   float* c, bool accumulate);
void gemm_at_avx2_f32(int64_t k0, int64_t k1, int64_t m, int64_t k, int64_t n, const float* a,
                      const float* b, float* c, bool accumulate);
void add_avx2_f32(int64_t n, const float* x, float* y);
void axpy_avx2_f32(int64_t n, float a, const float* x, float* y);
void scale_avx2_f32(int64_t n, float a, float* x);
void relu_avx2_f32(int64_t n, const float* x, float* y);
void relu_backward_avx2_f32(int64_t n, const float* x, const float* dy, float* dx);

}  // namespace fmfog::kern::detail

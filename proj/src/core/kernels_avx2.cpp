// SPDX-License-Identifier: Apache-2.0
//
// AVX2 kernel variants. Translation unit compiled with -mavx2; only entered
// after a CPUID check. Every loop keeps the scalar reference's per-element
// operation order: one multiply-then-add chain over k (or i) in ascending
// order, so results are bit-identical to kernels_scalar.cpp. No FMA.

#include "kernels_detail.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define FMFOG_X86 1
#include <immintrin.h>
#else
#define FMFOG_X86 0
#endif

namespace fmfog::kern::detail {

bool avx2_available() {
#if FMFOG_X86 && defined(__GNUC__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

#if FMFOG_X86

namespace {

// Column remainder handled with the same k-ordered chain, element by element.
inline void gemm_row_tail(const float* arow, const float* b, float* crow, int64_t k, int64_t n,
                          int64_t j0) {
  for (int64_t j = j0; j < n; ++j) {
    float acc = crow[j];
    for (int64_t kk = 0; kk < k; ++kk) acc += arow[kk] * b[kk * n + j];
    crow[j] = acc;
  }
}

}  // namespace

void gemm_avx2_f32(int64_t i0, int64_t i1, int64_t k, int64_t n, const float* a, const float* b,
                   float* c, bool accumulate) {
  for (int64_t i = i0; i < i1; ++i) {
    float* crow = c + i * n;
    if (!accumulate) {
      for (int64_t j = 0; j < n; ++j) crow[j] = 0.0f;
    }
    const float* arow = a + i * k;
    int64_t j = 0;
    // 32-column tiles: four accumulators held in registers across all of k.
    for (; j + 32 <= n; j += 32) {
      __m256 c0 = _mm256_loadu_ps(crow + j);
      __m256 c1 = _mm256_loadu_ps(crow + j + 8);
      __m256 c2 = _mm256_loadu_ps(crow + j + 16);
      __m256 c3 = _mm256_loadu_ps(crow + j + 24);
      for (int64_t kk = 0; kk < k; ++kk) {
        const __m256 av = _mm256_set1_ps(arow[kk]);
        const float* brow = b + kk * n + j;
        c0 = _mm256_add_ps(c0, _mm256_mul_ps(av, _mm256_loadu_ps(brow)));
        c1 = _mm256_add_ps(c1, _mm256_mul_ps(av, _mm256_loadu_ps(brow + 8)));
        c2 = _mm256_add_ps(c2, _mm256_mul_ps(av, _mm256_loadu_ps(brow + 16)));
        c3 = _mm256_add_ps(c3, _mm256_mul_ps(av, _mm256_loadu_ps(brow + 24)));
      }
      _mm256_storeu_ps(crow + j, c0);
      _mm256_storeu_ps(crow + j + 8, c1);
      _mm256_storeu_ps(crow + j + 16, c2);
      _mm256_storeu_ps(crow + j + 24, c3);
    }
    for (; j + 8 <= n; j += 8) {
      __m256 c0 = _mm256_loadu_ps(crow + j);
      for (int64_t kk = 0; kk < k; ++kk) {
        const __m256 av = _mm256_set1_ps(arow[kk]);
        c0 = _mm256_add_ps(c0, _mm256_mul_ps(av, _mm256_loadu_ps(b + kk * n + j)));
      }
      _mm256_storeu_ps(crow + j, c0);
    }
    gemm_row_tail(arow, b, crow, k, n, j);
  }
}

void gemm_at_avx2_f32(int64_t k0, int64_t k1, int64_t m, int64_t k, int64_t n, const float* a,
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
      const __m256 av = _mm256_set1_ps(aik);
      int64_t j = 0;
      for (; j + 8 <= n; j += 8) {
        const __m256 cv = _mm256_loadu_ps(crow + j);
        _mm256_storeu_ps(crow + j, _mm256_add_ps(cv, _mm256_mul_ps(av, _mm256_loadu_ps(brow + j))));
      }
      for (; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void add_avx2_f32(int64_t n, const float* x, float* y) {
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), _mm256_loadu_ps(x + i)));
  }
  for (; i < n; ++i) y[i] += x[i];
}

void axpy_avx2_f32(int64_t n, float a, const float* x, float* y) {
  const __m256 av = _mm256_set1_ps(a);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 prod = _mm256_mul_ps(av, _mm256_loadu_ps(x + i));
    _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2_f32(int64_t n, float a, float* x) {
  const __m256 av = _mm256_set1_ps(a);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(x + i, _mm256_mul_ps(av, _mm256_loadu_ps(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void relu_avx2_f32(int64_t n, const float* x, float* y) {
  const __m256 zero = _mm256_setzero_ps();
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_backward_avx2_f32(int64_t n, const float* x, const float* dy, float* dx) {
  const __m256 zero = _mm256_setzero_ps();
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(x + i), zero, _CMP_GT_OQ);
    const __m256 dxv = _mm256_loadu_ps(dx + i);
    const __m256 sum = _mm256_add_ps(dxv, _mm256_loadu_ps(dy + i));
    // Untouched lanes must keep their exact bits (scalar path branches).
    _mm256_storeu_ps(dx + i, _mm256_blendv_ps(dxv, sum, mask));
  }
  for (; i < n; ++i) {
    if (x[i] > 0.0f) dx[i] += dy[i];
  }
}

#else  // !FMFOG_X86

// Non-x86 builds fall back to the scalar reference; dispatch never selects
// the avx2 variant because avx2_available() is false.
void gemm_avx2_f32(int64_t i0, int64_t i1, int64_t k, int64_t n, const float* a, const float* b,
                   float* c, bool accumulate) {
  gemm_scalar_f32(i0, i1, k, n, a, b, c, accumulate);
}
void gemm_at_avx2_f32(int64_t k0, int64_t k1, int64_t m, int64_t k, int64_t n, const float* a,
                      const float* b, float* c, bool accumulate) {
  gemm_at_scalar_f32(k0, k1, m, k, n, a, b, c, accumulate);
}
void add_avx2_f32(int64_t n, const float* x, float* y) { add_scalar_f32(n, x, y); }
void axpy_avx2_f32(int64_t n, float a, const float* x, float* y) { axpy_scalar_f32(n, a, x, y); }
void scale_avx2_f32(int64_t n, float a, float* x) { scale_scalar_f32(n, a, x); }
void relu_avx2_f32(int64_t n, const float* x, float* y) { relu_scalar_f32(n, x, y); }
void relu_backward_avx2_f32(int64_t n, const float* x, const float* dy, float* dx) {
  relu_backward_scalar_f32(n, x, dy, dx);
}

#endif

}  // namespace fmfog::kern::detail

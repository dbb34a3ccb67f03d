// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace fmfog::kern {

// Arithmetic inner loops used by every layer. Each operation exists as a
// scalar reference kernel and, on x86-64 with AVX2, a vector variant that
// performs the identical per-element operation sequence (multiplies and
// adds in the same order, no FMA contraction), so the two are bit-identical.
// The active variant is selected once at startup from CPUID and can be
// overridden with FMFOG_KERNELS=scalar|avx2.

enum class Variant { scalar, avx2 };

// Currently selected variant (after dispatch_init).
Variant active_variant();
const char* variant_name();

// Force a variant; throws if unsupported on this CPU. Used by the
// equivalence tests.
void force_variant(Variant v);
bool variant_supported(Variant v);

// Number of worker threads for row-partitioned kernels. Partitioning is by
// output element, so results are bit-identical for any thread count.
void set_threads(int n);
int threads();

// C[M x N] = A[M x K] * B[K x N], row-major; accumulate adds into C.
void gemm(int64_t m, int64_t k, int64_t n, const float* a, const float* b, float* c,
          bool accumulate);
void gemm(int64_t m, int64_t k, int64_t n, const double* a, const double* b, double* c,
          bool accumulate);

// C[K x N] (+)= A^T * B with A[M x K], B[M x N]; the weight-gradient form.
void gemm_at(int64_t m, int64_t k, int64_t n, const float* a, const float* b, float* c,
             bool accumulate);
void gemm_at(int64_t m, int64_t k, int64_t n, const double* a, const double* b, double* c,
             bool accumulate);

// C[M x K] (+)= A * B^T with A[M x N], B[K x N]; the input-gradient form.
// Internally materializes B^T once, then reuses gemm.
void gemm_bt(int64_t m, int64_t k, int64_t n, const float* a, const float* b, float* c,
             bool accumulate);
void gemm_bt(int64_t m, int64_t k, int64_t n, const double* a, const double* b, double* c,
             bool accumulate);

void transpose(int64_t rows, int64_t cols, const float* in, float* out);
void transpose(int64_t rows, int64_t cols, const double* in, double* out);

// y += x
void add(int64_t n, const float* x, float* y);
void add(int64_t n, const double* x, double* y);

// y += a * x
void axpy(int64_t n, float a, const float* x, float* y);
void axpy(int64_t n, double a, const double* x, double* y);

void scale(int64_t n, float a, float* x);
void scale(int64_t n, double a, double* x);

// y = max(x, 0)
void relu(int64_t n, const float* x, float* y);
void relu(int64_t n, const double* x, double* y);

// dx += dy where x > 0
void relu_backward(int64_t n, const float* x, const float* dy, float* dx);
void relu_backward(int64_t n, const double* x, const double* dy, double* dx);

}  // namespace fmfog::kern

// SPDX-License-Identifier: Apache-2.0
//
// Variant selection and row-partitioned threading. Work is split by output
// element (rows of C for gemm, rows of C for gemm_at), so each element is
// produced by exactly one thread with the reference accumulation order and
// results do not depend on the thread count.

#include "fmfog/core/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "kernels_detail.hpp"

namespace fmfog::kern {

namespace {

Variant g_variant = [] {
  if (const char* env = std::getenv("FMFOG_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return Variant::scalar;
    if (v == "avx2" && detail::avx2_available()) return Variant::avx2;
  }
  return detail::avx2_available() ? Variant::avx2 : Variant::scalar;
}();

int g_threads = std::max(1, static_cast<int>(std::min(2u, std::thread::hardware_concurrency())));

// Below this many multiply-adds the spawn overhead dominates.
constexpr int64_t kParallelFlopsMin = 1 << 19;

template <typename Fn>
void parallel_ranges(int64_t rows, int64_t flops, Fn&& fn) {
  const int nt = (flops >= kParallelFlopsMin && rows >= 2) ? std::min<int64_t>(g_threads, rows) : 1;
  if (nt <= 1) {
    fn(0, rows);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<size_t>(nt - 1));
  const int64_t chunk = (rows + nt - 1) / nt;
  for (int t = 1; t < nt; ++t) {
    const int64_t lo = t * chunk;
    const int64_t hi = std::min(rows, lo + chunk);
    if (lo < hi) workers.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  fn(0, std::min(rows, chunk));
  for (auto& w : workers) w.join();
}

}  // namespace

Variant active_variant() { return g_variant; }

const char* variant_name() { return g_variant == Variant::avx2 ? "avx2" : "scalar"; }

void force_variant(Variant v) {
  if (v == Variant::avx2 && !detail::avx2_available()) {
    throw std::runtime_error("force_variant: CPU lacks AVX2");
  }
  g_variant = v;
}

bool variant_supported(Variant v) {
  return v == Variant::scalar || detail::avx2_available();
}

void set_threads(int n) { g_threads = std::max(1, n); }

int threads() { return g_threads; }

void gemm(int64_t m, int64_t k, int64_t n, const float* a, const float* b, float* c,
          bool accumulate) {
  const auto run = (g_variant == Variant::avx2) ? detail::gemm_avx2_f32 : detail::gemm_scalar_f32;
  parallel_ranges(m, m * k * n, [&](int64_t i0, int64_t i1) { run(i0, i1, k, n, a, b, c, accumulate); });
}

void gemm_at(int64_t m, int64_t k, int64_t n, const float* a, const float* b, float* c,
             bool accumulate) {
  const auto run =
      (g_variant == Variant::avx2) ? detail::gemm_at_avx2_f32 : detail::gemm_at_scalar_f32;
  parallel_ranges(k, m * k * n,
                  [&](int64_t k0, int64_t k1) { run(k0, k1, m, k, n, a, b, c, accumulate); });
}

void transpose(int64_t rows, int64_t cols, const float* in, float* out) {
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t col = 0; col < cols; ++col) out[col * rows + r] = in[r * cols + col];
  }
}

void transpose(int64_t rows, int64_t cols, const double* in, double* out) {
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t col = 0; col < cols; ++col) out[col * rows + r] = in[r * cols + col];
  }
}

void gemm_bt(int64_t m, int64_t k, int64_t n, const float* a, const float* b, float* c,
             bool accumulate) {
  std::vector<float> bt(static_cast<size_t>(k * n));
  transpose(k, n, b, bt.data());  // b is [K x N]; bt is [N x K]
  gemm(m, n, k, a, bt.data(), c, accumulate);
}

void add(int64_t n, const float* x, float* y) {
  (g_variant == Variant::avx2) ? detail::add_avx2_f32(n, x, y) : detail::add_scalar_f32(n, x, y);
}

void axpy(int64_t n, float a, const float* x, float* y) {
  (g_variant == Variant::avx2) ? detail::axpy_avx2_f32(n, a, x, y)
                               : detail::axpy_scalar_f32(n, a, x, y);
}

void scale(int64_t n, float a, float* x) {
  (g_variant == Variant::avx2) ? detail::scale_avx2_f32(n, a, x) : detail::scale_scalar_f32(n, a, x);
}

void relu(int64_t n, const float* x, float* y) {
  (g_variant == Variant::avx2) ? detail::relu_avx2_f32(n, x, y) : detail::relu_scalar_f32(n, x, y);
}

void relu_backward(int64_t n, const float* x, const float* dy, float* dx) {
  (g_variant == Variant::avx2) ? detail::relu_backward_avx2_f32(n, x, dy, dx)
                               : detail::relu_backward_scalar_f32(n, x, dy, dx);
}

// double precision: scalar only; used by the gradient-check path where the
// workloads are tiny.
void gemm(int64_t m, int64_t k, int64_t n, const double* a, const double* b, double* c,
          bool accumulate) {
  for (int64_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    if (!accumulate) {
      for (int64_t j = 0; j < n; ++j) crow[j] = 0.0;
    }
    for (int64_t kk = 0; kk < k; ++kk) {
      const double aik = a[i * k + kk];
      const double* brow = b + kk * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void gemm_at(int64_t m, int64_t k, int64_t n, const double* a, const double* b, double* c,
             bool accumulate) {
  if (!accumulate) {
    for (int64_t i = 0; i < k * n; ++i) c[i] = 0.0;
  }
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t kk = 0; kk < k; ++kk) {
      const double aik = a[i * k + kk];
      double* crow = c + kk * n;
      const double* brow = b + i * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void gemm_bt(int64_t m, int64_t k, int64_t n, const double* a, const double* b, double* c,
             bool accumulate) {
  std::vector<double> bt(static_cast<size_t>(k * n));
  transpose(k, n, b, bt.data());
  gemm(m, n, k, a, bt.data(), c, accumulate);
}

void add(int64_t n, const double* x, double* y) {
  for (int64_t i = 0; i < n; ++i) y[i] += x[i];
}

void axpy(int64_t n, double a, const double* x, double* y) {
  for (int64_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(int64_t n, double a, double* x) {
  for (int64_t i = 0; i < n; ++i) x[i] *= a;
}

void relu(int64_t n, const double* x, double* y) {
  for (int64_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(int64_t n, const double* x, const double* dy, double* dx) {
  for (int64_t i = 0; i < n; ++i) {
    if (x[i] > 0.0) dx[i] += dy[i];
  }
}

}  // namespace fmfog::kern

// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <vector>

#include "fmfog/core/kernels.hpp"
#include "fmfog/core/rng.hpp"

using namespace fmfog;

namespace {

std::vector<float> random_vec(int64_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(static_cast<size_t>(n));
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return v;
}

bool bit_equal(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST_CASE("gemm matches a plain triple loop") {
  const int64_t m = 7, k = 13, n = 21;
  auto a = random_vec(m * k, 1), b = random_vec(k * n, 2);
  std::vector<float> c(static_cast<size_t>(m * n), 0.0f), ref(static_cast<size_t>(m * n), 0.0f);
  for (int64_t i = 0; i < m; ++i)
    for (int64_t kk = 0; kk < k; ++kk)
      for (int64_t j = 0; j < n; ++j) ref[i * n + j] += a[i * k + kk] * b[kk * n + j];
  kern::gemm(m, k, n, a.data(), b.data(), c.data(), false);
  for (int64_t i = 0; i < m * n; ++i) CHECK(c[i] == doctest::Approx(ref[i]).epsilon(1e-5));
}

TEST_CASE("scalar and simd variants are bit-identical") {
  if (!kern::variant_supported(kern::Variant::avx2)) return;
  const auto saved = kern::active_variant();
  struct Shape { int64_t m, k, n; };
  // Odd sizes exercise the vector remainders.
  for (auto [m, k, n] : {Shape{1, 1, 1}, Shape{5, 3, 9}, Shape{33, 17, 63}, Shape{128, 128, 128},
                         Shape{64, 100, 37}}) {
    auto a = random_vec(m * k, 11 + m), b = random_vec(k * n, 17 + n);
    auto c0 = random_vec(m * n, 23), c1 = c0;

    kern::force_variant(kern::Variant::scalar);
    kern::gemm(m, k, n, a.data(), b.data(), c0.data(), true);
    kern::force_variant(kern::Variant::avx2);
    kern::gemm(m, k, n, a.data(), b.data(), c1.data(), true);
    CHECK(bit_equal(c0, c1));

    auto d0 = random_vec(k * n, 29), d1 = d0;
    kern::force_variant(kern::Variant::scalar);
    kern::gemm_at(m, k, n, a.data(), random_vec(m * n, 31).data(), d0.data(), true);
    kern::force_variant(kern::Variant::avx2);
    kern::gemm_at(m, k, n, a.data(), random_vec(m * n, 31).data(), d1.data(), true);
    CHECK(bit_equal(d0, d1));

    auto x = random_vec(m * n, 37);
    auto y0 = random_vec(m * n, 41), y1 = y0;
    kern::force_variant(kern::Variant::scalar);
    kern::add(m * n, x.data(), y0.data());
    kern::axpy(m * n, 1.37f, x.data(), y0.data());
    kern::scale(m * n, 0.73f, y0.data());
    kern::force_variant(kern::Variant::avx2);
    kern::add(m * n, x.data(), y1.data());
    kern::axpy(m * n, 1.37f, x.data(), y1.data());
    kern::scale(m * n, 0.73f, y1.data());
    CHECK(bit_equal(y0, y1));

    auto r0 = std::vector<float>(static_cast<size_t>(m * n)), r1 = r0;
    auto dy = random_vec(m * n, 43);
    auto dx0 = random_vec(m * n, 47), dx1 = dx0;
    kern::force_variant(kern::Variant::scalar);
    kern::relu(m * n, x.data(), r0.data());
    kern::relu_backward(m * n, x.data(), dy.data(), dx0.data());
    kern::force_variant(kern::Variant::avx2);
    kern::relu(m * n, x.data(), r1.data());
    kern::relu_backward(m * n, x.data(), dy.data(), dx1.data());
    CHECK(bit_equal(r0, r1));
    CHECK(bit_equal(dx0, dx1));
  }
  kern::force_variant(saved);
}

TEST_CASE("threading does not change results") {
  const int64_t m = 97, k = 64, n = 55;
  auto a = random_vec(m * k, 3), b = random_vec(k * n, 5);
  std::vector<float> c1(static_cast<size_t>(m * n)), c2 = c1;
  const int saved = kern::threads();
  kern::set_threads(1);
  kern::gemm(m, k, n, a.data(), b.data(), c1.data(), false);
  kern::set_threads(4);
  kern::gemm(m, k, n, a.data(), b.data(), c2.data(), false);
  kern::set_threads(saved);
  CHECK(bit_equal(c1, c2));
}

TEST_CASE("gemm_bt equals explicit transpose") {
  const int64_t m = 6, k = 10, n = 14;
  auto a = random_vec(m * n, 7), b = random_vec(k * n, 9);
  std::vector<float> bt(static_cast<size_t>(n * k));
  kern::transpose(k, n, b.data(), bt.data());
  std::vector<float> c1(static_cast<size_t>(m * k)), c2 = c1;
  kern::gemm_bt(m, k, n, a.data(), b.data(), c1.data(), false);
  kern::gemm(m, n, k, a.data(), bt.data(), c2.data(), false);
  CHECK(bit_equal(c1, c2));
}

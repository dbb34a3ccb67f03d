// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fmfog/nn/attention.hpp"
#include "fmfog/nn/conv.hpp"
#include "fmfog/nn/gradcheck.hpp"
#include "fmfog/nn/losses.hpp"
#include "fmfog/nn/lstm.hpp"
#include "fmfog/nn/optim.hpp"

using namespace fmfog;
using namespace fmfog::nn;

namespace {

// Fixed random projection turns a tensor output into a scalar loss so the
// finite-difference harness has a single value to probe.
struct Projection {
  Tensor<double> w;
  explicit Projection(const std::vector<int64_t>& shape, uint64_t seed) : w(shape) {
    Rng rng(seed);
    for (int64_t i = 0; i < w.size(); ++i) w[i] = rng.normal();
  }
  double loss(const Tensor<double>& y) const {
    double s = 0.0;
    for (int64_t i = 0; i < y.size(); ++i) s += w[i] * y[i];
    return s;
  }
  Tensor<double> grad() const { return w; }
};

void randomize(Tensor<double>& t, uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  for (int64_t i = 0; i < t.size(); ++i) t[i] = rng.normal() * scale;
}

}  // namespace

TEST_CASE("linear identity and hand arithmetic") {
  Linear<float> lin(2, 2);
  lin.weight().value.at(0, 0) = 1.0f;
  lin.weight().value.at(1, 1) = 1.0f;
  Tensor<float> x({3, 2});
  for (int64_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(i) * 0.5f;
  Tensor<float> y = lin.forward(x);
  for (int64_t i = 0; i < x.size(); ++i) CHECK(y[i] == x[i]);

  // W=[[1],[2]], b=[0.5], x=[[3,4]] -> 3*1+4*2+0.5 = 11.5
  Linear<float> l2(2, 1);
  l2.weight().value[0] = 1.0f;
  l2.weight().value[1] = 2.0f;
  l2.bias().value[0] = 0.5f;
  Tensor<float> x2({1, 2});
  x2[0] = 3.0f;
  x2[1] = 4.0f;
  CHECK(l2.forward(x2)[0] == doctest::Approx(11.5f));
}

TEST_CASE("linear gradcheck under 1e-6") {
  Linear<double> lin(5, 3);
  Rng rng(42);
  lin.init(rng);
  Param<double> input({4, 5});
  randomize(input.value, 7);
  Projection proj({4, 3}, 99);

  auto fwd = [&] { return proj.loss(lin.forward(input.value)); };
  auto fwd_bwd = [&] {
    const double l = proj.loss(lin.forward(input.value));
    Tensor<double> dx = lin.backward(proj.grad());
    kern::add(dx.size(), dx.data(), input.grad.data());
    return l;
  };
  GradChecker::Tracked tracked{{"w", &lin.weight()}, {"b", &lin.bias()}, {"x", &input}};
  auto report = GradChecker::run(tracked, fwd, fwd_bwd);
  CHECK(report.max_rel_err < 1e-6);
}

TEST_CASE("conv1d zero kernel and pool arithmetic") {
  Conv1d<float> conv(1, 1, 3);
  Tensor<float> x({1, 1, 8});
  for (int64_t i = 0; i < 8; ++i) x[i] = static_cast<float>(i - 3);
  Tensor<float> y = conv.forward(x);
  Tensor<float> yr(y.shape());
  kern::relu(y.size(), y.data(), yr.data());
  for (int64_t i = 0; i < yr.size(); ++i) CHECK(yr[i] == 0.0f);

  // K=1 identity kernel, pool over [3,1,4,1] -> [3,4]
  Conv1d<float> ident(1, 1, 1);
  ident.weight().value[0] = 1.0f;
  Tensor<float> x2({1, 1, 4});
  x2[0] = 3.0f; x2[1] = 1.0f; x2[2] = 4.0f; x2[3] = 1.0f;
  MaxPool1d<float> pool;
  Tensor<float> p = pool.forward(ident.forward(x2));
  CHECK(p.dim(2) == 2);
  CHECK(p[0] == 3.0f);
  CHECK(p[1] == 4.0f);
}

TEST_CASE("conv1d+relu+pool gradcheck under 1e-5") {
  Conv1d<double> conv(2, 3, 4);
  Rng rng(5);
  conv.init(rng);
  Param<double> input({2, 2, 10});
  randomize(input.value, 8);
  MaxPool1d<double> pool;
  Projection proj({2, 3, 5}, 101);

  Tensor<double> pre;
  auto run = [&](bool bwd) {
    Tensor<double> y = conv.forward(input.value);
    pre = y;
    Tensor<double> r(y.shape());
    kern::relu(y.size(), y.data(), r.data());
    Tensor<double> p = pool.forward(r);
    const double l = proj.loss(p);
    if (bwd) {
      Tensor<double> dr = pool.backward(proj.grad());
      Tensor<double> dy(dr.shape());
      kern::relu_backward(dy.size(), pre.data(), dr.data(), dy.data());
      Tensor<double> dx = conv.backward(dy);
      kern::add(dx.size(), dx.data(), input.grad.data());
    }
    return l;
  };
  GradChecker::Tracked tracked{{"w", &conv.weight()}, {"b", &conv.bias()}, {"x", &input}};
  auto report = GradChecker::run(tracked, [&] { return run(false); }, [&] { return run(true); });
  CHECK(report.max_rel_err < 1e-5);
}

TEST_CASE("lstm zero weights and scalar cell oracle") {
  Lstm<float> lstm(3, 4, 2);
  Tensor<float> x({2, 5, 3});
  Rng xr(3);
  for (int64_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(xr.normal());
  Tensor<float> y = lstm.forward(x);  // all parameters still zero
  for (int64_t i = 0; i < y.size(); ++i) CHECK(y[i] == 0.0f);

  // T=1 single cell, closed form on scalars.
  Lstm<double> cell(1, 1, 1);
  ParamRegistry<double> params;
  cell.params(params, "lstm");
  // wx rows: [i f g o]
  params[0].second->value[0] = 0.3;   // wx_i
  params[0].second->value[1] = -0.2;  // wx_f
  params[0].second->value[2] = 0.5;   // wx_g
  params[0].second->value[3] = 0.7;   // wx_o
  params[2].second->value[0] = 0.11;  // b_i
  params[2].second->value[1] = 0.13;  // b_f
  params[2].second->value[2] = 0.17;  // b_g
  params[2].second->value[3] = 0.19;  // b_o
  Tensor<double> xin({1, 1, 1});
  xin[0] = 0.9;
  const double out = cell.forward(xin)[0];
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const double gi = sig(0.3 * 0.9 + 0.11);
  const double gg = std::tanh(0.5 * 0.9 + 0.17);
  const double go = sig(0.7 * 0.9 + 0.19);
  const double c = gi * gg;  // zero initial state: forget term drops
  CHECK(out == doctest::Approx(go * std::tanh(c)).epsilon(1e-12));
}

TEST_CASE("lstm gradcheck T=3 H=4 under 1e-4") {
  Lstm<double> lstm(3, 4, 2);
  Rng rng(11);
  lstm.init(rng);
  Param<double> input({2, 3, 3});
  randomize(input.value, 21);
  Projection proj({2, 3, 4}, 55);

  auto fwd = [&] { return proj.loss(lstm.forward(input.value)); };
  auto fwd_bwd = [&] {
    const double l = proj.loss(lstm.forward(input.value));
    Tensor<double> dx = lstm.backward(proj.grad());
    kern::add(dx.size(), dx.data(), input.grad.data());
    return l;
  };
  GradChecker::Tracked tracked{{"x", &input}};
  ParamRegistry<double> params;
  lstm.params(params, "lstm");
  for (auto& [name, p] : params) tracked.emplace_back(name, p);
  auto report = GradChecker::run(tracked, fwd, fwd_bwd);
  CHECK(report.max_rel_err < 1e-4);
}

TEST_CASE("attention over T=1 is a singleton softmax") {
  MultiHeadAttention<float> mha(8, 2);
  Rng rng(2);
  mha.init(rng);
  Tensor<float> x({1, 8});
  for (int64_t i = 0; i < 8; ++i) x[i] = static_cast<float>(i) * 0.1f;
  mha.forward(x, 1, 1);
  CHECK(mha.last_probs(0, 0).size() == 1);
  CHECK(mha.last_probs(0, 0)[0] == doctest::Approx(1.0f));
}

TEST_CASE("attention rows sum to one") {
  MultiHeadAttention<float> mha(8, 2);
  Rng rng(4);
  mha.init(rng);
  Tensor<float> x({2 * 6, 8});
  for (int64_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(rng.normal());
  mha.forward(x, 2, 6);
  for (int64_t b = 0; b < 2; ++b) {
    for (int64_t h = 0; h < 2; ++h) {
      const auto& p = mha.last_probs(b, h);
      for (int64_t i = 0; i < 6; ++i) {
        double s = 0.0;
        for (int64_t j = 0; j < 6; ++j) s += p.at(i, j);
        CHECK(std::fabs(s - 1.0) < 1e-6);
      }
    }
  }
}

TEST_CASE("transformer block gradcheck B=2 T=4 D=8 heads=2 under 1e-4") {
  TransformerBlock<double> block(8, 2, 16, 0.0);
  Rng rng(13);
  block.init(rng);
  Param<double> input({2 * 4, 8});
  randomize(input.value, 31);
  Projection proj({2 * 4, 8}, 77);
  Rng fwd_rng(0);

  auto fwd = [&] { return proj.loss(block.forward(input.value, 2, 4, true, fwd_rng)); };
  auto fwd_bwd = [&] {
    const double l = proj.loss(block.forward(input.value, 2, 4, true, fwd_rng));
    Tensor<double> dx = block.backward(proj.grad());
    kern::add(dx.size(), dx.data(), input.grad.data());
    return l;
  };
  GradChecker::Tracked tracked{{"x", &input}};
  ParamRegistry<double> params;
  block.params(params, "block");
  for (auto& [name, p] : params) tracked.emplace_back(name, p);
  auto report = GradChecker::run(tracked, fwd, fwd_bwd);
  CHECK(report.max_rel_err < 1e-4);
}

TEST_CASE("layernorm output is standardized before affine") {
  LayerNorm<float> ln(64);
  Tensor<float> x({10, 64});
  Rng rng(6);
  for (int64_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(rng.normal() * 3.0 + 1.5);
  Tensor<float> y = ln.forward(x);
  for (int64_t i = 0; i < 10; ++i) {
    double mean = 0.0, var = 0.0;
    for (int64_t j = 0; j < 64; ++j) mean += y.at(i, j);
    mean /= 64.0;
    for (int64_t j = 0; j < 64; ++j) var += (y.at(i, j) - mean) * (y.at(i, j) - mean);
    var /= 64.0;
    CHECK(std::fabs(mean) < 1e-6);
    CHECK(std::fabs(std::sqrt(var) - 1.0) < 1e-4);
  }
}

TEST_CASE("embedding: distinct rows, sparse gradient") {
  Embedding<float> emb(6, 4);
  Rng rng(9);
  emb.init(rng);
  Tensor<float> out = emb.forward({1, 3});
  bool differ = false;
  for (int64_t j = 0; j < 4; ++j) differ |= out.at(0, j) != out.at(1, j);
  CHECK(differ);

  Tensor<float> dy({2, 4});
  dy.fill(1.0f);
  emb.backward(dy);
  for (int64_t r = 0; r < 6; ++r) {
    for (int64_t j = 0; j < 4; ++j) {
      if (r == 1 || r == 3) {
        CHECK(emb.table().grad.at(r, j) == 1.0f);
      } else {
        CHECK(emb.table().grad.at(r, j) == 0.0f);
      }
    }
  }
  CHECK_THROWS_AS(emb.forward({6}), IndexError);
}

TEST_CASE("positional encoding at position 0 is (0,1,0,1,...)") {
  auto pe = sinusoidal_positional<float>(16, 8);
  for (int64_t i = 0; i < 8; i += 2) {
    CHECK(pe.at(0, i) == 0.0f);
    CHECK(pe.at(0, i + 1) == 1.0f);
  }
  // distinct positions get distinct encodings
  bool differ = false;
  for (int64_t i = 0; i < 8; ++i) differ |= pe.at(1, i) != pe.at(2, i);
  CHECK(differ);
}

TEST_CASE("masked_mse basics") {
  Tensor<float> pred({1, 4, 2}), target({1, 4, 2});
  Rng rng(15);
  for (int64_t i = 0; i < pred.size(); ++i) pred[i] = target[i] = static_cast<float>(rng.normal());
  std::vector<uint8_t> mask{1, 0, 1, 0};
  std::vector<uint8_t> chan{1, 1};
  auto r = masked_mse(pred, target, mask, chan);
  CHECK(r.loss == 0.0);

  pred[0] += 1.0f;
  auto r2 = masked_mse(pred, target, mask, chan);
  CHECK(r2.loss == doctest::Approx(1.0 / 4.0));  // 2 masked t x 2 chans
  // gradient is zero at unmasked positions
  CHECK(r2.grad.at(0, 1, 0) == 0.0f);
  CHECK(r2.grad.at(0, 3, 1) == 0.0f);

  std::vector<uint8_t> none{0, 0, 0, 0};
  CHECK_THROWS_AS(masked_mse(pred, target, none, chan), DegenerateInputError);
}

TEST_CASE("cross entropy of uniform logits is ln 2") {
  Tensor<float> logits({2, 2});
  auto r = cross_entropy(logits, {0, 1});
  CHECK(r.loss == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("adamw: zero gradient with zero decay leaves parameters unchanged") {
  Param<float> p({3});
  p.value[0] = 1.0f; p.value[1] = -2.0f; p.value[2] = 0.5f;
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  AdamW<float> opt(cfg);
  opt.add_group({&p});
  opt.step(1e-3);
  CHECK(p.value[0] == 1.0f);
  CHECK(p.value[1] == -2.0f);
  CHECK(p.value[2] == 0.5f);
}

TEST_CASE("adamw single step matches hand arithmetic to 1e-12") {
  Param<double> p({1});
  p.value[0] = 1.0;
  p.grad[0] = 0.5;
  AdamWConfig cfg;
  cfg.lr = 0.1;  // unused; step takes the base rate
  AdamW<double> opt(cfg);
  opt.add_group({&p});
  opt.step(0.1);

  const double m = (1.0 - cfg.beta1) * 0.5;
  const double v = (1.0 - cfg.beta2) * 0.25;
  const double mhat = m / (1.0 - cfg.beta1);
  const double vhat = v / (1.0 - cfg.beta2);
  const double expect = 1.0 - 0.1 * (mhat / (std::sqrt(vhat) + cfg.eps)) - 0.1 * cfg.weight_decay * 1.0;
  CHECK(p.value[0] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("cosine schedule endpoints") {
  CHECK(cosine_lr(0, 100, 5e-4, 1e-6) == doctest::Approx(5e-4));
  CHECK(cosine_lr(100, 100, 5e-4, 1e-6) == doctest::Approx(1e-6));
  CHECK(cosine_lr(50, 100, 1.0, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("dropout: rate 0 is identity, eval is identity, seeded reproducible") {
  Dropout<float> d0(0.0);
  Tensor<float> x({4, 4});
  Rng rng(1);
  for (int64_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(rng.normal());
  Rng r1(5);
  Tensor<float> y = d0.forward(x, true, r1);
  for (int64_t i = 0; i < x.size(); ++i) CHECK(y[i] == x[i]);

  Dropout<float> d5(0.5);
  Rng r2(5);
  Tensor<float> e = d5.forward(x, false, r2);
  for (int64_t i = 0; i < x.size(); ++i) CHECK(e[i] == x[i]);

  Rng r3(5), r4(5);
  Tensor<float> a = d5.forward(x, true, r3);
  Dropout<float> d5b(0.5);
  Tensor<float> b = d5b.forward(x, true, r4);
  for (int64_t i = 0; i < x.size(); ++i) CHECK(a[i] == b[i]);
}

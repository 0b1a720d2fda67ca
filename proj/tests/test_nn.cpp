// Copyright 2026  The phonaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include "doctest.h"
#include "gradcheck.hpp"
#include "phonaug/error.hpp"
#include "phonaug/nn.hpp"

using namespace phonaug;
using namespace phonaug::nn;
namespace t = phonaug::testing;

TEST_CASE("embedding") {
  Parameter table("e", {4, 3});
  std::mt19937_64 gen(1);
  t::Fill(table.value.values, gen);
  std::vector<int> ids{1, 1};
  Array out = EmbeddingForward(ids, table);
  REQUIRE(out.shape == std::vector<std::size_t>{2, 3});
  for (std::size_t c = 0; c < 3; ++c) CHECK(out(0, c) == out(1, c));

  std::vector<int> ids2{0, 2, 2, 3};
  Array ones({4, 3}, 1.0);
  table.ZeroGrad();
  EmbeddingBackward(ids2, ones, table);
  const double counts[4] = {1, 0, 2, 1};
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 3; ++c) CHECK(table.grad.values[r * 3 + c] == counts[r]);

  CHECK(t::CheckEmbedding(3, 4, {0, 2, 2}, 5) < 1e-4);
  std::vector<int> bad{4};
  CHECK_THROWS_AS(EmbeddingForward(bad, table), Error);
  std::vector<int> neg{-1};
  CHECK_THROWS_AS(EmbeddingForward(neg, table), Error);
}

TEST_CASE("conv1d") {
  Parameter w("w", {1, 3, 1}), b("b", {1});
  w.value.values = {1, 1, 1};
  Array x({4, 1});
  x.values = {1, 2, 3, 4};
  CHECK(Conv1dForward(x, w, b).values == Values{3, 6, 9, 7});

  Parameter wz("w", {2, 3, 2}), bz("b", {2});
  bz.value.values = {0.25, -1.5};
  Array xr({5, 2});
  std::mt19937_64 gen(3);
  t::Fill(xr.values, gen);
  Array y = Conv1dForward(xr, wz, bz);
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(y(r, 0) == 0.25);
    CHECK(y(r, 1) == -1.5);
  }

  CHECK(t::CheckConv(5, 3, 3, 3, 11) < 1e-4);
  CHECK(t::CheckConv(1, 2, 4, 3, 12) < 1e-4);
  CHECK(t::CheckConv(6, 2, 3, 5, 13) < 1e-4);

  Array wrong({5, 3});
  CHECK_THROWS_AS(Conv1dForward(wrong, wz, bz), Error);
  for (std::size_t T : {1u, 2u, 9u}) {
    Array xt({T, 2});
    CHECK(Conv1dForward(xt, wz, bz).rows() == T);
  }
}

TEST_CASE("relu") {
  Array x({1, 4});
  x.values = {-1.0, 0.0, 2.0, -0.5};
  CHECK(ReluForward(x).values == Values{0.0, 0.0, 2.0, 0.0});
  CHECK(t::CheckRelu(20, 4) < 1e-4);
  CHECK(t::CheckConv(5, 3, 3, 3, 21, true) < 1e-4);
}

TEST_CASE("lstm") {
  SUBCASE("zero parameters give zero hidden states") {
    std::vector<LstmLayerParams> layers;
    layers.emplace_back("l0", 3, 4);
    Array x({5, 3}, 0.7);
    LstmOutput out = LstmForward(x, layers);
    for (double v : out.hidden.values) CHECK(v == 0.0);
    for (double v : out.final_cell.values) CHECK(v == 0.0);
  }
  SUBCASE("a single step equals one cell application") {
    std::mt19937_64 gen(9);
    const std::size_t in = 3, H = 2;
    std::vector<LstmLayerParams> layers;
    layers.emplace_back("l0", in, H);
    t::Fill(layers[0].w_input.value.values, gen);
    t::Fill(layers[0].w_hidden.value.values, gen);
    t::Fill(layers[0].bias.value.values, gen);
    Array x({1, in});
    t::Fill(x.values, gen);
    LstmOutput out = LstmForward(x, layers);
    auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
    for (std::size_t j = 0; j < H; ++j) {
      double z[4];
      for (int g = 0; g < 4; ++g) {
        const std::size_t row = g * H + j;
        z[g] = layers[0].bias.value.values[row];
        for (std::size_t k = 0; k < in; ++k)
          z[g] += layers[0].w_input.value.values[row * in + k] * x.values[k];
      }
      const double c = sig(z[0]) * std::tanh(z[2]);  // f * c0 vanishes
      const double h = sig(z[3]) * std::tanh(c);
      CHECK(out.hidden.values[j] == doctest::Approx(h).epsilon(1e-12));
      CHECK(out.final_cell.values[j] == doctest::Approx(c).epsilon(1e-12));
      CHECK(out.final_hidden.values[j] == out.hidden.values[j]);
    }
  }
  SUBCASE("gradients, one and two layers") {
    CHECK(t::CheckLstm(4, 5, 6, 1, 31) < 1e-4);
    CHECK(t::CheckLstm(4, 3, 6, 2, 32) < 1e-4);
  }
}

TEST_CASE("linear + sigmoid") {
  Parameter w("w", {3, 4}), b("b", {3});
  std::vector<double> h{0.3, -1.0, 2.0, 0.5};
  for (double p : LinearSigmoidForward(h, w, b).values) CHECK(p == 0.5);
  b.value.values = {30, 30, 30};
  for (double p : LinearSigmoidForward(h, w, b).values) CHECK(p > 1 - 1e-9);
  CHECK(t::CheckLinearSigmoid(6, 4, 41) < 1e-4);
  CHECK(t::CheckFusedHead(6, 4, 42) < 1e-4);
}

TEST_CASE("bce loss") {
  Array target({3});
  target.values = {0, 1, 0};
  CHECK(BceLoss(target, target).loss <= 1e-6);
  Array p({2}), y({2});
  p.values = {0.5, 0.5};
  y.values = {1, 0};
  CHECK(BceLoss(p, y).loss == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(t::CheckBce(5, 51) < 1e-4);

  // logit gradient equals chain rule through the sigmoid
  Array q({3});
  q.values = {0.2, 0.7, 0.4};
  Array grad_p = BceLoss(q, target).grad;
  Array grad_z = BceLogitGrad(q, target);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(grad_z.values[i] ==
          doctest::Approx(grad_p.values[i] * q.values[i] * (1 - q.values[i])));
}

TEST_CASE("adam") {
  AdamConfig cfg;
  SUBCASE("first step moves by lr") {
    Parameter p("p", {2, 2});
    p.grad.values.assign(4, 1.0);
    AdamStep(p, cfg);
    for (double v : p.value.values) CHECK(v == doctest::Approx(-0.000999999).epsilon(1e-6));
    CHECK(p.step_count == 1);
    for (double g : p.grad.values) CHECK(g == 0.0);
  }
  SUBCASE("zero gradient leaves values unchanged") {
    Parameter p("p", {3});
    p.value.values = {1, -2, 3};
    AdamStep(p, cfg);
    CHECK(p.value.values == Values{1, -2, 3});
  }
  SUBCASE("minimises w^2 and agrees with a scalar reference") {
    Parameter p("p", {1});
    p.value.values = {1.0};
    AdamConfig fast = cfg;
    fast.lr = 0.1;
    double w = 1.0, m = 0.0, v = 0.0;
    for (int step = 1; step <= 100; ++step) {
      p.grad.values = {2.0 * p.value.values[0]};
      AdamStep(p, fast);
      const double g = 2.0 * w;
      m = 0.9 * m + 0.1 * g;
      v = 0.999 * v + 0.001 * g * g;
      const double mh = m / (1 - std::pow(0.9, step)), vh = v / (1 - std::pow(0.999, step));
      w -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    }
    CHECK(std::abs(p.value.values[0]) < 0.05);
    CHECK(p.value.values[0] == doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("forward passes are pure") {
  std::mt19937_64 gen(7);
  std::vector<LstmLayerParams> layers;
  layers.emplace_back("l0", 3, 4);
  t::Fill(layers[0].w_input.value.values, gen);
  Array x({6, 3});
  t::Fill(x.values, gen);
  CHECK(LstmForward(x, layers).hidden == LstmForward(x, layers).hidden);
}

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
#include "phonaug/augment.hpp"
#include "phonaug/error.hpp"
#include "phonaug/model.hpp"
#include "test_util.hpp"

using namespace phonaug;
namespace t = phonaug::testing;

namespace {

ModelConfig Small() {
  ModelConfig c;
  c.embedding_size = 8;
  c.n_filters = 6;
  c.hidden_size = 5;
  c.n_intents = 0;  // taken from the label list
  return c;
}

Vocabulary Abc() { return Vocabulary({"a", "b", "c", "d"}); }

}  // namespace

TEST_CASE("build") {
  Model m = BuildModel(ModelConfig{}, Abc(), {"down", "up"}, 1);
  CHECK(m.head_weight.value.shape == std::vector<std::size_t>{2, 256});
  CHECK(m.embedding.value.shape == std::vector<std::size_t>{5, 256});
  CHECK(m.conv_weight.value.shape == std::vector<std::size_t>{256, 3, 256});
  CHECK(m.lstm.size() == 1);
  CHECK(m.config().vocab_size == 5);
  CHECK(SerializeCheckpoint(m) == SerializeCheckpoint(BuildModel(ModelConfig{}, Abc(), {"down", "up"}, 1)));
  CHECK(SerializeCheckpoint(m) != SerializeCheckpoint(BuildModel(ModelConfig{}, Abc(), {"down", "up"}, 2)));

  ModelConfig bad = Small();
  bad.kernel_size = 4;
  try {
    BuildModel(bad, Abc(), {"x", "y"}, 0);
    FAIL("expected a config error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kConfig);
  }
  bad = Small();
  bad.lstm_layers = 3;
  CHECK_THROWS_AS(BuildModel(bad, Abc(), {"x", "y"}, 0), Error);
  bad = Small();
  bad.hidden_size = 0;
  CHECK_THROWS_AS(BuildModel(bad, Abc(), {"x", "y"}, 0), Error);

  ModelConfig two = Small();
  two.lstm_layers = 2;
  Model m2 = BuildModel(two, Abc(), {"x", "y", "z"}, 0);
  CHECK(m2.lstm.size() == 2);
  CHECK(m2.head_weight.value.shape == std::vector<std::size_t>{3, 5});

  // initialisation bounds: 1/sqrt(fan_in)
  const double bound = 1.0 / std::sqrt(3.0 * 256.0);
  for (double v : m.conv_weight.value.values) CHECK(std::abs(v) <= bound);
}

TEST_CASE("forward") {
  Model m = BuildModel(Small(), Abc(), {"i1", "i2", "i3"}, 4);
  for (std::size_t T = 1; T <= 12; ++T) {
    std::vector<int> ids;
    for (std::size_t k = 0; k < T; ++k) ids.push_back(1 + static_cast<int>(k % 4));
    nn::Array p = Forward(m, ids);
    REQUIRE(p.size() == 3);
    for (double v : p.values) CHECK((v > 0.0 && v < 1.0));
    CHECK(Forward(m, ids) == p);
  }
  std::vector<int> empty;
  try {
    Forward(m, empty);
    FAIL("expected an argument error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kArgument);
  }
  std::fill(m.head_weight.value.values.begin(), m.head_weight.value.values.end(), 0.0);
  std::fill(m.head_bias.value.values.begin(), m.head_bias.value.values.end(), 0.0);
  std::vector<int> ids{1, 2, 3};
  for (double v : Forward(m, ids).values) CHECK(v == 0.5);
}

TEST_CASE("model gradient matches finite differences") {
  CHECK(t::CheckModel(1, 3) < 1e-4);
  CHECK(t::CheckModel(2, 4) < 1e-4);
}

TEST_CASE("predict") {
  nn::Array p({2});
  p.values = {0.9, 0.2};
  CHECK(ArgmaxLabel(p, {"alpha", "beta"}) == "alpha");
  p.values = {0.5, 0.5};
  CHECK(ArgmaxLabel(p, {"alpha", "beta"}) == "alpha");
  p.values = {0.1, 0.7, 0.7};
  CHECK(ArgmaxLabel(p, {"a", "b", "c"}) == "b");

  // argmax invariance under strictly monotone maps
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> dist(0.01, 0.99);
  for (int rep = 0; rep < 100; ++rep) {
    nn::Array q({4});
    for (double &v : q.values) v = dist(gen);
    nn::Array r = q;
    for (double &v : r.values) v = std::log(v / (1 - v)) * 3.0 + 7.0;
    CHECK(ArgmaxLabel(q, {"a", "b", "c", "d"}) == ArgmaxLabel(r, {"a", "b", "c", "d"}));
  }

  Model m = BuildModel(Small(), Abc(), {"x", "y"}, 2);
  Transcript tr = t::TwoCandidateTranscript({"a", "c"}, "b");
  const std::string label = Predict(m, tr);
  CHECK((label == "x" || label == "y"));
  Transcript unknown = t::TwoCandidateTranscript({"q"}, "b");
  CHECK_THROWS_AS(Predict(m, unknown), Error);
  CHECK_THROWS_AS(m.IntentIndex("nope"), Error);
}

TEST_CASE("phone vectors") {
  Model m = BuildModel(Small(), Abc(), {"x", "y"}, 5);
  // make "b" and "d" share an embedding row
  const std::size_t dim = 8;
  for (std::size_t c = 0; c < dim; ++c)
    m.embedding.value.values[4 * dim + c] = m.embedding.value.values[2 * dim + c];
  auto vecs = ExtractPhoneVectors(m, m.vocabulary());
  CHECK(vecs.size() == m.vocabulary().size() - 1);
  CHECK(vecs.count("<pad>") == 0);
  CHECK(vecs.at("b") == vecs.at("d"));
  for (const auto &[sym, v] : vecs) CHECK(v.size() == 6);

  // each vector is ReLU(W[:, centre tap] e + bias)
  for (const auto &[sym, v] : vecs) {
    const int id = m.vocabulary().IdOf(sym);
    for (std::size_t o = 0; o < 6; ++o) {
      double z = m.conv_bias.value.values[o];
      for (std::size_t c = 0; c < dim; ++c)
        z += m.conv_weight.value.values[(o * 3 + 1) * dim + c] *
             m.embedding.value.values[id * dim + c];
      CHECK(v[o] == doctest::Approx(std::max(0.0, z)).epsilon(1e-12));
    }
  }
}

TEST_CASE("checkpoint round trip") {
  ModelConfig c = Small();
  c.lstm_layers = 2;
  Model m = BuildModel(c, Abc(), {"left", "right", "stop"}, 6);
  t::TempDir dir;
  SaveCheckpoint(m, dir / "m.ckpt");
  Model back = LoadCheckpoint(dir / "m.ckpt");
  CHECK(back.config() == m.config());
  CHECK(back.vocabulary() == m.vocabulary());
  CHECK(back.intent_labels() == m.intent_labels());
  CHECK(back.LayerSpecs() == m.LayerSpecs());
  std::mt19937_64 gen(1);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<int> ids(1 + gen() % 10);
    for (int &id : ids) id = 1 + static_cast<int>(gen() % 4);
    nn::Array a = Forward(m, ids), b = Forward(back, ids);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-12);
  }
  CHECK(SerializeCheckpoint(back) == SerializeCheckpoint(m));

  auto bytes = SerializeCheckpoint(m);
  CHECK(std::string(bytes.begin(), bytes.begin() + 6) == "PHAUG1");
  auto corrupt = bytes;
  corrupt[0] = 'X';
  CHECK_THROWS_AS(DeserializeCheckpoint(corrupt), Error);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  CHECK_THROWS_AS(DeserializeCheckpoint(truncated), Error);
}

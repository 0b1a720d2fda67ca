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

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "phonaug/corpus.hpp"
#include "phonaug/nn.hpp"

namespace phonaug {

// Baseline classifier hyperparameters. Defaults follow the published
// baseline: 256-wide embedding, kernel-3 conv with 256 filters, one 256-unit
// LSTM layer, no batch normalisation.
struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t embedding_size = 256;
  std::size_t kernel_size = 3;
  std::size_t n_filters = 256;
  std::size_t lstm_layers = 1;
  std::size_t hidden_size = 256;
  std::size_t n_intents = 2;

  void Validate() const;
  bool operator==(const ModelConfig &) const = default;
};

// embedding -> conv1d (same padding) -> ReLU -> LSTM -> final hidden state ->
// linear + sigmoid.
class Model {
 public:
  Model() = default;
  Model(ModelConfig config, Vocabulary vocabulary,
        std::vector<std::string> intent_labels);

  const ModelConfig &config() const { return config_; }
  const Vocabulary &vocabulary() const { return vocabulary_; }
  const std::vector<std::string> &intent_labels() const { return intent_labels_; }
  std::size_t IntentIndex(const std::string &label) const;

  std::vector<nn::LayerSpec> LayerSpecs() const;

  // Parameters in declaration order (checkpoint order).
  std::vector<nn::Parameter *> Parameters();
  std::vector<const nn::Parameter *> Parameters() const;
  std::size_t ParameterCount() const;

  nn::Parameter embedding;
  nn::Parameter conv_weight;
  nn::Parameter conv_bias;
  std::vector<nn::LstmLayerParams> lstm;
  nn::Parameter head_weight;
  nn::Parameter head_bias;

 private:
  ModelConfig config_;
  Vocabulary vocabulary_;
  std::vector<std::string> intent_labels_;
};

// Uniform(-a, a) initialisation with a = 1/sqrt(fan_in); the embedding table
// uses fan_in = 1.
Model BuildModel(const ModelConfig &config, const Vocabulary &vocabulary,
                 const std::vector<std::string> &intent_labels,
                 std::uint64_t seed);

nn::Array Forward(const Model &model, std::span<const int> ids);

// Forward + backward for one utterance; gradients are added to the
// parameters' accumulators. Returns the loss and writes probabilities.
double AccumulateGradients(Model &model, std::span<const int> ids,
                           std::size_t target, nn::Array *probs = nullptr);

// Argmax with ties resolved to the smaller label.
std::string ArgmaxLabel(const nn::Array &probs,
                        const std::vector<std::string> &labels);

std::string Predict(const Model &model, const Transcript &transcript,
                    const Vocabulary &vocabulary);
std::string Predict(const Model &model, const Transcript &transcript);

// Output of embedding -> conv1d -> ReLU for each length-1 sequence.
std::map<std::string, std::vector<double>> ExtractPhoneVectors(
    const Model &model, const Vocabulary &vocabulary);

// Binary checkpoint: "PHAUG1", u64 LE header length, JSON header, then every
// parameter value as little-endian float64 in declaration order.
std::vector<std::uint8_t> SerializeCheckpoint(const Model &model);
Model DeserializeCheckpoint(const std::vector<std::uint8_t> &bytes);
void SaveCheckpoint(const Model &model, const std::string &path);
Model LoadCheckpoint(const std::string &path);

}  // namespace phonaug

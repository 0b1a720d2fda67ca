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

#include "phonaug/model.hpp"

#include <algorithm>
#include <cmath>

#include "phonaug/error.hpp"
#include "phonaug/rng.hpp"

namespace phonaug {

using nn::Array;
using nn::LayerKind;
using nn::Parameter;

void ModelConfig::Validate() const {
  auto positive = [](std::size_t v, const char *name) {
    if (v < 1) throw Error(ErrorKind::kConfig, std::string(name) + " must be >= 1");
  };
  positive(vocab_size, "vocab_size");
  positive(embedding_size, "embedding_size");
  positive(kernel_size, "kernel_size");
  positive(n_filters, "n_filters");
  positive(hidden_size, "hidden_size");
  positive(n_intents, "n_intents");
  if (kernel_size % 2 == 0)
    throw Error(ErrorKind::kConfig, "kernel_size must be odd, got " +
                                        std::to_string(kernel_size));
  if (lstm_layers != 1 && lstm_layers != 2)
    throw Error(ErrorKind::kConfig, "lstm_layers must be 1 or 2");
}

Model::Model(ModelConfig config, Vocabulary vocabulary,
             std::vector<std::string> intent_labels)
    : config_(config),
      vocabulary_(std::move(vocabulary)),
      intent_labels_(std::move(intent_labels)) {
  config_.Validate();
  if (vocabulary_.size() != config_.vocab_size)
    throw Error(ErrorKind::kConfig, "vocabulary size does not match config");
  if (intent_labels_.size() != config_.n_intents)
    throw Error(ErrorKind::kConfig, "intent label count does not match config");
  if (!std::is_sorted(intent_labels_.begin(), intent_labels_.end()) ||
      std::adjacent_find(intent_labels_.begin(), intent_labels_.end()) !=
          intent_labels_.end())
    throw Error(ErrorKind::kConfig, "intent labels must be sorted and distinct");

  embedding = Parameter("embedding", {config_.vocab_size, config_.embedding_size});
  conv_weight = Parameter("conv.weight", {config_.n_filters, config_.kernel_size,
                                          config_.embedding_size});
  conv_bias = Parameter("conv.bias", {config_.n_filters});
  std::size_t input = config_.n_filters;
  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    lstm.emplace_back("lstm" + std::to_string(l), input, config_.hidden_size);
    input = config_.hidden_size;
  }
  head_weight = Parameter("head.weight", {config_.n_intents, config_.hidden_size});
  head_bias = Parameter("head.bias", {config_.n_intents});
}

std::size_t Model::IntentIndex(const std::string &label) const {
  auto it = std::lower_bound(intent_labels_.begin(), intent_labels_.end(), label);
  if (it == intent_labels_.end() || *it != label)
    throw Error(ErrorKind::kData, "intent '" + label + "' unknown to the model");
  return static_cast<std::size_t>(it - intent_labels_.begin());
}

std::vector<nn::LayerSpec> Model::LayerSpecs() const {
  const auto &c = config_;
  return {
      {LayerKind::kEmbedding, {c.vocab_size, c.embedding_size}},
      {LayerKind::kConv1d, {c.kernel_size, c.embedding_size, c.n_filters}},
      {LayerKind::kRelu, {}},
      {LayerKind::kLstm, {c.n_filters, c.hidden_size, c.lstm_layers}},
      {LayerKind::kLinear, {c.hidden_size, c.n_intents}},
      {LayerKind::kSigmoid, {}},
  };
}

std::vector<Parameter *> Model::Parameters() {
  std::vector<Parameter *> out{&embedding, &conv_weight, &conv_bias};
  for (auto &layer : lstm) {
    out.push_back(&layer.w_input);
    out.push_back(&layer.w_hidden);
    out.push_back(&layer.bias);
  }
  out.push_back(&head_weight);
  out.push_back(&head_bias);
  return out;
}

std::vector<const Parameter *> Model::Parameters() const {
  auto mut = const_cast<Model *>(this)->Parameters();
  return {mut.begin(), mut.end()};
}

std::size_t Model::ParameterCount() const {
  std::size_t n = 0;
  for (const auto *p : Parameters()) n += p->value.size();
  return n;
}

Model BuildModel(const ModelConfig &config, const Vocabulary &vocabulary,
                 const std::vector<std::string> &intent_labels,
                 std::uint64_t seed) {
  ModelConfig cfg = config;
  if (cfg.vocab_size == 0) cfg.vocab_size = vocabulary.size();
  if (cfg.n_intents == 0) cfg.n_intents = intent_labels.size();
  Model m(cfg, vocabulary, intent_labels);

  Rng rng(seed);
  auto bound = [](std::size_t fan_in) {
    return 1.0 / std::sqrt(static_cast<double>(fan_in));
  };
  m.embedding.InitUniform(1.0, rng);
  const double conv_bound = bound(cfg.kernel_size * cfg.embedding_size);
  m.conv_weight.InitUniform(conv_bound, rng);
  m.conv_bias.InitUniform(conv_bound, rng);
  for (auto &layer : m.lstm) {
    layer.w_input.InitUniform(bound(layer.input()), rng);
    layer.w_hidden.InitUniform(bound(layer.hidden()), rng);
    layer.bias.InitUniform(bound(layer.hidden()), rng);
  }
  m.head_weight.InitUniform(bound(cfg.hidden_size), rng);
  m.head_bias.InitUniform(bound(cfg.hidden_size), rng);
  return m;
}

namespace {

std::span<const double> LastRow(const Array &a) {
  const std::size_t cols = a.cols();
  return {a.values.data() + (a.rows() - 1) * cols, cols};
}

void CheckIds(std::span<const int> ids) {
  if (ids.empty())
    throw Error(ErrorKind::kArgument, "cannot classify an empty phone sequence");
}

}  // namespace

Array Forward(const Model &model, std::span<const int> ids) {
  CheckIds(ids);
  const Array emb = nn::EmbeddingForward(ids, model.embedding);
  const Array conv = nn::Conv1dForward(emb, model.conv_weight, model.conv_bias);
  const Array act = nn::ReluForward(conv);
  const nn::LstmOutput rnn = nn::LstmForward(act, model.lstm);
  return nn::LinearSigmoidForward(LastRow(rnn.hidden), model.head_weight,
                                  model.head_bias);
}

double AccumulateGradients(Model &model, std::span<const int> ids,
                           std::size_t target, Array *probs_out) {
  CheckIds(ids);
  const std::size_t n_intents = model.config().n_intents;
  if (target >= n_intents)
    throw Error(ErrorKind::kIndex, "target intent index out of range");

  const Array emb = nn::EmbeddingForward(ids, model.embedding);
  const Array conv = nn::Conv1dForward(emb, model.conv_weight, model.conv_bias);
  const Array act = nn::ReluForward(conv);
  nn::LstmCache cache;
  const nn::LstmOutput rnn = nn::LstmForward(act, model.lstm, &cache);
  const auto last = LastRow(rnn.hidden);
  const Array probs =
      nn::LinearSigmoidForward(last, model.head_weight, model.head_bias);

  Array onehot({n_intents});
  onehot.values[target] = 1.0;
  const double loss = nn::BceLoss(probs, onehot).loss;

  // sigmoid and cross-entropy derivatives fused to stay exact at saturation
  const Array grad_logits = nn::BceLogitGrad(probs, onehot);
  const Array grad_last = nn::LinearBackwardFromLogits(
      last, grad_logits, model.head_weight, model.head_bias);
  Array grad_hidden({rnn.hidden.rows(), rnn.hidden.cols()});
  std::copy(grad_last.values.begin(), grad_last.values.end(),
            grad_hidden.values.end() - static_cast<std::ptrdiff_t>(grad_last.size()));
  const Array grad_act = nn::LstmBackward(cache, grad_hidden, model.lstm);
  const Array grad_conv = nn::ReluBackward(conv, grad_act);
  const Array grad_emb =
      nn::Conv1dBackward(emb, grad_conv, model.conv_weight, model.conv_bias);
  nn::EmbeddingBackward(ids, grad_emb, model.embedding);

  if (probs_out) *probs_out = probs;
  return loss;
}

std::string ArgmaxLabel(const Array &probs, const std::vector<std::string> &labels) {
  if (probs.size() != labels.size() || labels.empty())
    throw Error(ErrorKind::kShape, "probability/label count mismatch");
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    const double a = probs.values[i], b = probs.values[best];
    if (a > b || (a == b && labels[i] < labels[best])) best = i;
  }
  return labels[best];
}

std::string Predict(const Model &model, const Transcript &transcript,
                    const Vocabulary &vocabulary) {
  const std::vector<int> ids = Encode(transcript, vocabulary);
  return ArgmaxLabel(Forward(model, ids), model.intent_labels());
}

std::string Predict(const Model &model, const Transcript &transcript) {
  return Predict(model, transcript, model.vocabulary());
}

std::map<std::string, std::vector<double>> ExtractPhoneVectors(
    const Model &model, const Vocabulary &vocabulary) {
  std::map<std::string, std::vector<double>> out;
  for (const auto &symbol : vocabulary.symbols()) {
    if (symbol == Vocabulary::kPad) continue;
    const int id = model.vocabulary().IdOf(symbol);
    const int ids[1] = {id};
    const Array emb = nn::EmbeddingForward(ids, model.embedding);
    const Array act =
        nn::ReluForward(nn::Conv1dForward(emb, model.conv_weight, model.conv_bias));
    out.emplace(symbol, std::vector<double>(act.values.begin(), act.values.end()));
  }
  return out;
}

}  // namespace phonaug

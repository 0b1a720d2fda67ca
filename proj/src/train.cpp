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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "phonaug/error.hpp"
#include "phonaug/harness.hpp"
#include "phonaug/rng.hpp"

namespace phonaug {

namespace {

// seed-derivation tags
constexpr std::uint64_t kInitTag = 0x494e4954;     // "INIT"
constexpr std::uint64_t kShuffleTag = 0x53485546;  // "SHUF"
constexpr std::uint64_t kNoiseTag = 0x4e4f4953;    // "NOIS"
constexpr std::uint64_t kSimilarTag = 0x53494d49;  // "SIMI"

struct Example {
  const Transcript *transcript;
  std::size_t target;
};

struct Snapshot {
  std::vector<nn::Values> values;

  static Snapshot Take(const Model &m) {
    Snapshot s;
    for (const auto *p : m.Parameters()) s.values.push_back(p->value.values);
    return s;
  }
  void Restore(Model &m) const {
    auto params = m.Parameters();
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value.values = values[i];
  }
};

struct Monitor {
  double accuracy = 0.0;
  double loss = 0.0;
};

Monitor Measure(const Model &model, const std::vector<const Utterance *> &utts) {
  Monitor m;
  std::size_t correct = 0;
  for (const auto *u : utts) {
    const auto ids = Encode(u->transcript, model.vocabulary());
    const nn::Array probs = Forward(model, ids);
    const auto &labels = model.intent_labels();
    auto it = std::lower_bound(labels.begin(), labels.end(), u->intent);
    nn::Array onehot({probs.size()});
    if (it != labels.end() && *it == u->intent)
      onehot.values[static_cast<std::size_t>(it - labels.begin())] = 1.0;
    m.loss += nn::BceLoss(probs, onehot).loss;
    if (ArgmaxLabel(probs, model.intent_labels()) == u->intent) ++correct;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(utts.size());
  m.loss /= static_cast<double>(utts.size());
  return m;
}

bool ModelFinite(const Model &m) {
  for (const auto *p : m.Parameters())
    if (!p->value.AllFinite()) return false;
  return true;
}

}  // namespace

const char *MethodName(Method method) {
  switch (method) {
    case Method::kBaseline: return "baseline";
    case Method::kVoice: return "voice";
    case Method::kPhoneNoise: return "phone_noise";
    case Method::kVoicePhoneNoise: return "voice+phone_noise";
    case Method::kSimilarPhone: return "similar_phone";
  }
  return "?";
}

Method ParseMethod(const std::string &text) {
  for (Method m : kAllMethods)
    if (text == MethodName(m)) return m;
  throw Error(ErrorKind::kConfig, "unknown method '" + text + "'");
}

std::uint64_t MethodIndex(Method method) { return static_cast<std::uint64_t>(method); }

bool UsesVoice(Method method) {
  return method == Method::kVoice || method == Method::kVoicePhoneNoise;
}

bool UsesPhoneNoise(Method method) {
  return method == Method::kPhoneNoise || method == Method::kVoicePhoneNoise;
}

void TrainConfig::Validate() const {
  if (epochs < 1) throw Error(ErrorKind::kConfig, "epochs must be >= 1");
  if (patience < 1) throw Error(ErrorKind::kConfig, "patience must be >= 1");
  if (batch_size < 1) throw Error(ErrorKind::kConfig, "batch_size must be >= 1");
  if (!(adam.lr > 0.0)) throw Error(ErrorKind::kConfig, "lr must be positive");
  policy.Validate();
  if (UsesPhoneNoise(method) && policy.noise_swaps < 1)
    throw Error(ErrorKind::kConfig, "phone-noise methods need noise_swaps >= 1");
  if (method == Method::kSimilarPhone && !(policy.similar_rate > 0.0))
    throw Error(ErrorKind::kConfig, "similar_phone needs similar_rate > 0");
}

TrainResult Train(const Model &initial, const Dataset &dataset,
                  const TrainConfig &cfg, const SimilarityMap *map,
                  const Dataset *voice) {
  cfg.Validate();
  const auto train_utts = dataset.SplitView(Split::kTrain);
  if (train_utts.empty()) throw Error(ErrorKind::kData, "train split is empty");
  if (cfg.method == Method::kSimilarPhone && map == nullptr)
    throw Error(ErrorKind::kConfig, "similar_phone training needs a similarity map");
  if (UsesVoice(cfg.method) && voice == nullptr)
    throw Error(ErrorKind::kConfig, std::string(MethodName(cfg.method)) +
                                        " needs voice-augmented transcripts");

  Model model = initial;
  for (auto *p : model.Parameters()) p->ZeroGrad();

  std::vector<Example> base;
  for (const auto *u : train_utts)
    base.push_back({&u->transcript, model.IntentIndex(u->intent)});
  if (UsesVoice(cfg.method)) {
    std::map<std::string, const Utterance *> by_id;
    for (const auto &u : voice->utterances) by_id.emplace(u.id, &u);
    for (const auto *u : train_utts) {
      auto it = by_id.find(u->id);
      if (it == by_id.end())
        throw Error(ErrorKind::kData,
                    "no voice-augmented transcript for '" + u->id + "'");
      if (it->second->intent != u->intent)
        throw Error(ErrorKind::kData, "voice transcript '" + u->id +
                                          "' has a different intent");
      base.push_back({&it->second->transcript, model.IntentIndex(u->intent)});
    }
  }

  auto monitor_utts = dataset.SplitView(Split::kValid);
  if (monitor_utts.empty()) monitor_utts = train_utts;

  TrainResult result;
  Snapshot best;
  double best_acc = -1.0, best_loss = 0.0;
  std::size_t since_improved = 0;

  std::vector<Transcript> scratch;
  std::vector<Example> items;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    items = base;
    scratch.clear();
    if (UsesPhoneNoise(cfg.method)) {
      AugmentPolicy noise{cfg.policy.noise_swaps, 0.0, false, ExpansionMode::kAppend};
      const std::uint64_t epoch_seed = MixSeed(cfg.seed, {kNoiseTag, epoch});
      scratch.reserve(base.size());
      for (std::size_t i = 0; i < base.size(); ++i)
        scratch.push_back(AugmentTranscript(*base[i].transcript, noise, nullptr,
                                            MixSeed(epoch_seed, {i})));
      for (std::size_t i = 0; i < base.size(); ++i)
        items.push_back({&scratch[i], base[i].target});
    } else if (cfg.method == Method::kSimilarPhone) {
      scratch.reserve(base.size());
      for (std::size_t i = 0; i < base.size(); ++i)
        scratch.push_back(SimilarPhoneAugment(*base[i].transcript, *map,
                                              cfg.policy.similar_rate,
                                              MixSeed(cfg.seed, {kSimilarTag, epoch, i})));
      for (std::size_t i = 0; i < base.size(); ++i) items[i].transcript = &scratch[i];
    }

    Rng order_rng(MixSeed(cfg.seed, {kShuffleTag, epoch}));
    order_rng.Shuffle(items);

    double loss_sum = 0.0;
    const auto params = model.Parameters();
    for (std::size_t start = 0; start < items.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(items.size(), start + cfg.batch_size);
      for (std::size_t k = start; k < end; ++k) {
        const auto ids = Encode(*items[k].transcript, model.vocabulary());
        loss_sum += AccumulateGradients(model, ids, items[k].target);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto *p : params) {
        for (double &g : p->grad.values) g *= scale;
        nn::AdamStep(*p, cfg.adam);
      }
    }
    if (!ModelFinite(model))
      throw Error(ErrorKind::kData, "non-finite parameters at epoch " +
                                        std::to_string(epoch));

    const Monitor mon = Measure(model, monitor_utts);
    result.history.push_back(
        {epoch, loss_sum / static_cast<double>(items.size()), mon.accuracy, mon.loss});

    const bool better_acc = mon.accuracy > best_acc;
    if (better_acc || (mon.accuracy == best_acc && mon.loss < best_loss)) {
      best = Snapshot::Take(model);
      best_loss = mon.loss;
      result.best_epoch = epoch;
    }
    if (better_acc) {
      best_acc = mon.accuracy;
      since_improved = 0;
    } else if (++since_improved >= cfg.patience) {
      break;
    }
  }

  best.Restore(model);
  for (auto *p : model.Parameters()) p->ZeroGrad();
  result.model = std::move(model);
  return result;
}

TrainResult TrainFromScratch(const ModelConfig &model_cfg, const Dataset &dataset,
                             const TrainConfig &cfg, const SimilarityMap *map,
                             const Dataset *voice) {
  std::vector<std::string> symbols = dataset.vocabulary.symbols();
  if (voice && UsesVoice(cfg.method))
    symbols.insert(symbols.end(), voice->vocabulary.symbols().begin(),
                   voice->vocabulary.symbols().end());
  if (map && cfg.method == Method::kSimilarPhone)
    for (const auto &[from, to] : map->neighbor) symbols.push_back(to);
  const Vocabulary vocab(symbols);

  ModelConfig mc = model_cfg;
  mc.vocab_size = 0;
  mc.n_intents = 0;
  const Model initial = BuildModel(mc, vocab, IntentLabels(dataset, Split::kTrain),
                                   MixSeed(cfg.seed, {kInitTag}));
  return Train(initial, dataset, cfg, map, voice);
}

double Evaluate(const Model &model, const Dataset &dataset, Split split) {
  const auto utts = dataset.SplitView(split);
  if (utts.empty())
    throw Error(ErrorKind::kData,
                std::string("split '") + SplitName(split) + "' is empty");
  std::size_t correct = 0;
  for (const auto *u : utts)
    if (Predict(model, u->transcript) == u->intent) ++correct;
  return static_cast<double>(correct) / static_cast<double>(utts.size());
}

}  // namespace phonaug

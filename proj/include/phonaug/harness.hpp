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
#include <optional>
#include <string>
#include <vector>

#include "phonaug/audio.hpp"
#include "phonaug/augment.hpp"
#include "phonaug/corpus.hpp"
#include "phonaug/model.hpp"

namespace phonaug {

enum class Method { kBaseline, kVoice, kPhoneNoise, kVoicePhoneNoise, kSimilarPhone };

inline constexpr Method kAllMethods[] = {Method::kBaseline, Method::kVoice,
                                         Method::kPhoneNoise,
                                         Method::kVoicePhoneNoise,
                                         Method::kSimilarPhone};

const char *MethodName(Method method);
Method ParseMethod(const std::string &text);
// Stable index used in seed derivation (declaration order above).
std::uint64_t MethodIndex(Method method);
bool UsesVoice(Method method);
bool UsesPhoneNoise(Method method);

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 8;
  nn::AdamConfig adam;
  std::size_t patience = 20;
  Method method = Method::kBaseline;
  AugmentPolicy policy{1, 0.1, false, ExpansionMode::kReplace};
  std::uint64_t seed = 0;

  void Validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double monitor_accuracy = 0.0;  // valid split, or train when valid is empty
  double monitor_loss = 0.0;
};

struct TrainResult {
  Model model;  // best checkpoint by monitored accuracy
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;
};

// Voice-augmented transcripts are matched to train utterances by id. They
// come from re-recognising augmented audio and cannot be produced here.
TrainResult Train(const Model &initial, const Dataset &dataset,
                  const TrainConfig &cfg, const SimilarityMap *map = nullptr,
                  const Dataset *voice = nullptr);

// Convenience: builds the model from the dataset (vocabulary, sorted train
// intents) with seed derived from cfg.seed, then trains.
TrainResult TrainFromScratch(const ModelConfig &model_cfg, const Dataset &dataset,
                             const TrainConfig &cfg,
                             const SimilarityMap *map = nullptr,
                             const Dataset *voice = nullptr);

double Evaluate(const Model &model, const Dataset &dataset, Split split);

struct ResultRow {
  Method method = Method::kBaseline;
  std::size_t intents = 0;
  std::size_t speakers = 0;
  std::size_t recordings = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;

  bool operator==(const ResultRow &) const = default;
};

struct GridOptions {
  std::vector<Method> methods{Method::kBaseline};
  ModelConfig model;
  TrainConfig train;  // method and seed are overridden per cell
  SubsampleOptions subsample;
  std::size_t jobs = 1;
};

// Seed of one grid cell: MixSeed(base, {method index, I, S, K, trial}).
std::uint64_t CellSeed(std::uint64_t base, Method method, std::size_t intents,
                       std::size_t speakers, std::size_t recordings,
                       std::size_t trial);
// Subsample seed shared by all methods of one (I, S, K, trial) cell.
std::uint64_t SubsampleSeed(std::uint64_t base, std::size_t intents,
                            std::size_t speakers, std::size_t recordings,
                            std::size_t trial);

std::vector<ResultRow> RunGrid(const Dataset &dataset, const GridSpec &grid,
                               const GridOptions &options,
                               const Dataset *voice = nullptr);

void SortRows(std::vector<ResultRow> &rows);

struct SyntheticOptions {
  std::size_t n_intents = 36;
  std::size_t n_speakers = 11;
  std::size_t n_recordings = 10;
  std::uint64_t seed = 0;
  // Words of 3-4 phones; every intent concatenates 2-3 of them.
  std::size_t lexicon_size = 6;
  // Per-speaker accent: probability that a phone is realised as its partner.
  double accent_rate = 0.2;
  // Per-recording random substitution / deletion probabilities.
  double substitution_rate = 0.1;
  double deletion_rate = 0.05;
  // Probability that the recogniser ranks the confusable partner first.
  double recognizer_confusion = 0.3;
  // Same, for transcripts of voice-augmented audio.
  double voice_confusion = 0.35;
};

struct SyntheticCorpus {
  Dataset clean;
  Dataset voice;  // same ids, transcripts of the voice-augmented recordings
};

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticOptions &options);

// 30-phone alphabet and its confusable-partner pairing.
const std::vector<std::string> &SyntheticAlphabet();
std::size_t SyntheticPartner(std::size_t phone);

// Tonal rendering: each phone is an 80 ms two-sine chord at 16 kHz.
Waveform RenderTonal(const Transcript &transcript, int sample_rate = 16000);
// Writes one WAV per utterance into dir and sets audio paths on the dataset.
void WriteTonalWavs(Dataset &dataset, const std::string &dir);

std::string FormatCsv(const std::vector<ResultRow> &rows);
void EmitCsv(const std::vector<ResultRow> &rows, const std::string &path);
std::string FormatSvg(const std::vector<ResultRow> &rows);
void EmitSvg(const std::vector<ResultRow> &rows, const std::string &path);

}  // namespace phonaug

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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace phonaug {

// One entry of a recognizer posterior: a phone label and its natural-log
// probability.
struct PhoneCandidate {
  std::string symbol;
  double logprob = 0.0;

  bool operator==(const PhoneCandidate &) const = default;
};

// Candidates ordered by descending logprob (equal logprobs by ascending
// symbol). Symbols are distinct.
struct PhoneToken {
  std::vector<PhoneCandidate> candidates;

  const std::string &Top() const { return candidates.front().symbol; }
  bool operator==(const PhoneToken &) const = default;
};

struct Transcript {
  std::vector<PhoneToken> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::vector<std::string> TopSymbols() const;
  bool operator==(const Transcript &) const = default;
};

enum class Split { kTrain, kValid, kTest };

const char *SplitName(Split split);
Split ParseSplit(std::string_view text);

struct Utterance {
  std::string id;
  std::string speaker;
  std::string intent;
  Split split = Split::kTrain;
  Transcript transcript;
  std::optional<std::string> audio_path;

  bool operator==(const Utterance &) const = default;
};

// Phone inventory. Index 0 is reserved for padding; the remaining symbols are
// kept in ascending byte order so ids do not depend on file order.
class Vocabulary {
 public:
  static constexpr const char *kPad = "<pad>";
  static constexpr int kPadId = 0;

  Vocabulary();
  // Builds from an arbitrary symbol collection (duplicates and PAD ignored).
  explicit Vocabulary(const std::vector<std::string> &symbols);

  std::size_t size() const { return symbols_.size(); }
  bool Contains(std::string_view symbol) const;
  // Throws kVocabulary for unknown symbols.
  int IdOf(std::string_view symbol) const;
  const std::string &SymbolOf(int id) const;
  const std::vector<std::string> &symbols() const { return symbols_; }

  bool operator==(const Vocabulary &other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

struct Dataset {
  std::vector<Utterance> utterances;
  Vocabulary vocabulary;

  std::vector<const Utterance *> SplitView(Split split) const;
  std::size_t CountSplit(Split split) const;
  // Recomputes the vocabulary from every candidate of every token.
  void RebuildVocabulary();
};

struct GridSpec {
  std::vector<std::size_t> intents_counts{2};
  std::vector<std::size_t> speakers_counts{1, 2, 6, 7};
  std::vector<std::size_t> recordings_counts{1, 2, 3, 4, 5, 6, 7};
  std::size_t trials = 3;
  std::uint64_t base_seed = 0;

  void Validate() const;
};

// Sorts candidates into canonical order and checks token invariants.
void NormalizeToken(PhoneToken &token);

// JSON Lines ingestion. Errors name the 1-based line number.
Dataset ParseDataset(std::string_view text);
Dataset LoadDataset(const std::string &path);
std::string FormatUtterance(const Utterance &utt);
void SaveDataset(const Dataset &dataset, const std::string &path);

struct SubsampleOptions {
  // When set, valid/test are also restricted to the selected speakers.
  bool eval_selected_speakers_only = false;
};

Dataset Subsample(const Dataset &dataset, std::size_t n_intents,
                  std::size_t n_speakers, std::size_t n_recordings,
                  std::uint64_t seed, const SubsampleOptions &options = {});

std::vector<int> Encode(const Transcript &transcript,
                        const Vocabulary &vocabulary);
std::vector<std::string> Decode(std::span<const int> ids,
                                const Vocabulary &vocabulary);

// Sorted distinct labels of a split.
std::vector<std::string> IntentLabels(const Dataset &dataset, Split split);

}  // namespace phonaug

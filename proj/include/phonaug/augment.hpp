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
#include <optional>
#include <string>
#include <vector>

#include "phonaug/corpus.hpp"

namespace phonaug {

// Nearest distinct phone under cosine similarity of CNN feature vectors.
struct SimilarityMap {
  std::map<std::string, std::string> neighbor;
  std::map<std::string, double> score;

  bool operator==(const SimilarityMap &) const = default;
};

enum class ExpansionMode { kReplace, kAppend };

struct AugmentPolicy {
  int noise_swaps = 0;         // 0, 1 or 2
  double similar_rate = 0.0;   // [0, 1]
  bool use_voice = false;
  ExpansionMode expansion_mode = ExpansionMode::kReplace;

  void Validate() const;
};

const char *ExpansionModeName(ExpansionMode mode);
ExpansionMode ParseExpansionMode(const std::string &text);

inline constexpr const char *kAugmentSuffix = "#aug1";

// Cosines closer than this count as equal.
inline constexpr double kCosineTieTolerance = 1e-12;

// Ties in similarity resolve to the smaller symbol. PAD entries are ignored.
SimilarityMap BuildSimilarityMap(
    const std::map<std::string, std::vector<double>> &phone_vectors);

// Promotes the second-ranked candidate of up to n_swaps distinct, seeded
// positions (tokens with at least two candidates).
Transcript AllosaurusNoise(const Transcript &transcript, int n_swaps,
                           std::uint64_t seed);

// Replaces each mapped top-1 symbol with its neighbour with probability rate.
// One Bernoulli draw is consumed per token, mapped or not.
Transcript SimilarPhoneAugment(const Transcript &transcript,
                               const SimilarityMap &map, double rate,
                               std::uint64_t seed);

// Applies the phoneme-space part of a policy to one transcript.
Transcript AugmentTranscript(const Transcript &transcript,
                             const AugmentPolicy &policy,
                             const SimilarityMap *map, std::uint64_t seed);

// Append mode: every train utterance gets one augmented copy with id suffix
// "#aug1"; copies follow all originals. Replace mode returns the input.
Dataset ExpandDataset(const Dataset &dataset, const AugmentPolicy &policy,
                      const std::optional<SimilarityMap> &map,
                      std::uint64_t seed);

std::string SimilarityMapToJson(const SimilarityMap &map);
SimilarityMap SimilarityMapFromJson(const std::string &text);
void SaveSimilarityMap(const SimilarityMap &map, const std::string &path);
SimilarityMap LoadSimilarityMap(const std::string &path);

}  // namespace phonaug

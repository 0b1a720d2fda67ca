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

#include "phonaug/augment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "phonaug/error.hpp"
#include "phonaug/rng.hpp"

namespace phonaug {

void AugmentPolicy::Validate() const {
  if (noise_swaps < 0 || noise_swaps > 2)
    throw Error(ErrorKind::kConfig, "noise_swaps must be 0, 1 or 2");
  if (!(similar_rate >= 0.0 && similar_rate <= 1.0))
    throw Error(ErrorKind::kConfig, "similar_rate must lie in [0, 1]");
}

const char *ExpansionModeName(ExpansionMode mode) {
  return mode == ExpansionMode::kAppend ? "append" : "replace";
}

ExpansionMode ParseExpansionMode(const std::string &text) {
  if (text == "append") return ExpansionMode::kAppend;
  if (text == "replace") return ExpansionMode::kReplace;
  throw Error(ErrorKind::kConfig, "unknown expansion mode '" + text + "'");
}

SimilarityMap BuildSimilarityMap(
    const std::map<std::string, std::vector<double>> &phone_vectors) {
  std::vector<std::pair<std::string, const std::vector<double> *>> phones;
  for (const auto &[sym, vec] : phone_vectors)
    if (sym != Vocabulary::kPad) phones.emplace_back(sym, &vec);
  if (phones.size() < 2)
    throw Error(ErrorKind::kCapacity, "similarity map needs at least 2 phones");

  const std::size_t dim = phones.front().second->size();
  std::vector<double> norms;
  for (const auto &[sym, vec] : phones) {
    if (vec->size() != dim)
      throw Error(ErrorKind::kShape, "vector for '" + sym + "' has dimension " +
                                         std::to_string(vec->size()) +
                                         ", expected " + std::to_string(dim));
    double sq = 0.0;
    for (double v : *vec) sq += v * v;
    if (!(sq > 0.0))
      throw Error(ErrorKind::kDegenerate, "zero vector for '" + sym + "'");
    norms.push_back(std::sqrt(sq));
  }

  SimilarityMap map;
  std::vector<double> cos(phones.size());
  for (std::size_t p = 0; p < phones.size(); ++p) {
    const auto &a = *phones[p].second;
    double top = -2.0;
    for (std::size_t q = 0; q < phones.size(); ++q) {
      if (q == p) continue;
      const auto &b = *phones[q].second;
      double dot = 0.0;
      for (std::size_t i = 0; i < dim; ++i) dot += a[i] * b[i];
      cos[q] = std::clamp(dot / (norms[p] * norms[q]), -1.0, 1.0);
      top = std::max(top, cos[q]);
    }
    // Cosines that agree to within rounding are ties; phones are in
    // ascending symbol order, so the first one within tolerance wins.
    for (std::size_t q = 0; q < phones.size(); ++q) {
      if (q == p || cos[q] < top - kCosineTieTolerance) continue;
      map.neighbor[phones[p].first] = phones[q].first;
      map.score[phones[p].first] = cos[q];
      break;
    }
  }
  return map;
}

Transcript AllosaurusNoise(const Transcript &transcript, int n_swaps,
                           std::uint64_t seed) {
  Transcript out = transcript;
  if (n_swaps <= 0) return out;
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < out.tokens.size(); ++i)
    if (out.tokens[i].candidates.size() >= 2) eligible.push_back(i);
  Rng rng(seed);
  for (std::size_t pos : rng.Sample(eligible, static_cast<std::size_t>(n_swaps))) {
    auto &cands = out.tokens[pos].candidates;
    std::swap(cands[0], cands[1]);
  }
  return out;
}

Transcript SimilarPhoneAugment(const Transcript &transcript,
                               const SimilarityMap &map, double rate,
                               std::uint64_t seed) {
  Transcript out = transcript;
  Rng rng(seed);
  for (auto &tok : out.tokens) {
    const bool fire = rng.Bernoulli(rate);
    if (!fire) continue;
    auto it = map.neighbor.find(tok.Top());
    if (it == map.neighbor.end()) continue;
    auto &cands = tok.candidates;
    // keep symbols distinct: if the neighbour is already a lower-ranked
    // candidate, the two exchange symbols
    for (std::size_t k = 1; k < cands.size(); ++k) {
      if (cands[k].symbol == it->second) {
        cands[k].symbol = cands[0].symbol;
        break;
      }
    }
    cands[0].symbol = it->second;
  }
  return out;
}

Transcript AugmentTranscript(const Transcript &transcript,
                             const AugmentPolicy &policy,
                             const SimilarityMap *map, std::uint64_t seed) {
  Transcript out = transcript;
  if (policy.noise_swaps > 0)
    out = AllosaurusNoise(out, policy.noise_swaps, MixSeed(seed, {1}));
  if (policy.similar_rate > 0.0) {
    if (map == nullptr)
      throw Error(ErrorKind::kConfig, "similar-phone augmentation needs a map");
    out = SimilarPhoneAugment(out, *map, policy.similar_rate, MixSeed(seed, {2}));
  }
  return out;
}

Dataset ExpandDataset(const Dataset &dataset, const AugmentPolicy &policy,
                      const std::optional<SimilarityMap> &map,
                      std::uint64_t seed) {
  policy.Validate();
  if (policy.similar_rate > 0.0 && !map)
    throw Error(ErrorKind::kConfig,
                "similar_rate > 0 requires a similarity map");
  if (policy.expansion_mode == ExpansionMode::kReplace) return dataset;

  Dataset out = dataset;
  const SimilarityMap *map_ptr = map ? &*map : nullptr;
  std::uint64_t index = 0;
  for (const auto &u : dataset.utterances) {
    if (u.split != Split::kTrain) continue;
    Utterance copy = u;
    copy.id += kAugmentSuffix;
    copy.transcript =
        AugmentTranscript(u.transcript, policy, map_ptr, MixSeed(seed, {index++}));
    out.utterances.push_back(std::move(copy));
  }
  if (map_ptr) {
    // map neighbours may come from a wider inventory than this dataset
    Dataset probe = out;
    probe.RebuildVocabulary();
    std::vector<std::string> merged = probe.vocabulary.symbols();
    merged.insert(merged.end(), dataset.vocabulary.symbols().begin(),
                  dataset.vocabulary.symbols().end());
    out.vocabulary = Vocabulary(merged);
  }
  return out;
}

std::string SimilarityMapToJson(const SimilarityMap &map) {
  nlohmann::ordered_json doc;
  doc["neighbors"] = nlohmann::ordered_json::object();
  doc["scores"] = nlohmann::ordered_json::object();
  for (const auto &[k, v] : map.neighbor) doc["neighbors"][k] = v;
  for (const auto &[k, v] : map.score) doc["scores"][k] = v;
  return doc.dump(2) + "\n";
}

SimilarityMap SimilarityMapFromJson(const std::string &text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kParse, std::string("similarity map: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("neighbors") || !doc.contains("scores"))
    throw Error(ErrorKind::kParse,
                "similarity map needs 'neighbors' and 'scores' objects");
  SimilarityMap map;
  try {
    for (const auto &[k, v] : doc["neighbors"].items())
      map.neighbor[k] = v.get<std::string>();
    for (const auto &[k, v] : doc["scores"].items())
      map.score[k] = v.get<double>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kParse, std::string("similarity map: ") + e.what());
  }
  for (const auto &[k, v] : map.neighbor) {
    if (k == v)
      throw Error(ErrorKind::kIntegrity, "phone '" + k + "' maps to itself");
    if (k == Vocabulary::kPad)
      throw Error(ErrorKind::kIntegrity, "PAD in similarity map");
  }
  return map;
}

void SaveSimilarityMap(const SimilarityMap &map, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  out << SimilarityMapToJson(map);
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

SimilarityMap LoadSimilarityMap(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return SimilarityMapFromJson(buf.str());
}

}  // namespace phonaug

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

#include "phonaug/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "phonaug/error.hpp"
#include "phonaug/rng.hpp"

namespace phonaug {

using nlohmann::json;

std::vector<std::string> Transcript::TopSymbols() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto &tok : tokens) out.push_back(tok.Top());
  return out;
}

const char *SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "train";
}

Split ParseSplit(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "valid") return Split::kValid;
  if (text == "test") return Split::kTest;
  throw Error(ErrorKind::kParse, "unknown split '" + std::string(text) + "'");
}

Vocabulary::Vocabulary() : symbols_{kPad} { index_.emplace(kPad, kPadId); }

Vocabulary::Vocabulary(const std::vector<std::string> &symbols) : Vocabulary() {
  std::set<std::string> sorted(symbols.begin(), symbols.end());
  sorted.erase(kPad);
  for (const auto &s : sorted) {
    index_.emplace(s, static_cast<int>(symbols_.size()));
    symbols_.push_back(s);
  }
}

bool Vocabulary::Contains(std::string_view symbol) const {
  return index_.count(std::string(symbol)) != 0;
}

int Vocabulary::IdOf(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end())
    throw Error(ErrorKind::kVocabulary,
                "symbol '" + std::string(symbol) + "' not in vocabulary");
  return it->second;
}

const std::string &Vocabulary::SymbolOf(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= symbols_.size())
    throw Error(ErrorKind::kVocabulary, "id " + std::to_string(id) +
                                            " outside vocabulary of size " +
                                            std::to_string(symbols_.size()));
  return symbols_[id];
}

std::vector<const Utterance *> Dataset::SplitView(Split split) const {
  std::vector<const Utterance *> out;
  for (const auto &u : utterances)
    if (u.split == split) out.push_back(&u);
  return out;
}

std::size_t Dataset::CountSplit(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(utterances.begin(), utterances.end(),
                    [split](const Utterance &u) { return u.split == split; }));
}

void Dataset::RebuildVocabulary() {
  std::vector<std::string> symbols;
  for (const auto &u : utterances)
    for (const auto &tok : u.transcript.tokens)
      for (const auto &c : tok.candidates) symbols.push_back(c.symbol);
  vocabulary = Vocabulary(symbols);
}

void GridSpec::Validate() const {
  auto check = [](const std::vector<std::size_t> &counts, const char *name) {
    if (counts.empty())
      throw Error(ErrorKind::kConfig, std::string(name) + " must not be empty");
    for (auto c : counts)
      if (c < 1)
        throw Error(ErrorKind::kConfig, std::string(name) + " must be >= 1");
  };
  check(intents_counts, "intents_counts");
  check(speakers_counts, "speakers_counts");
  check(recordings_counts, "recordings_counts");
  if (trials < 1) throw Error(ErrorKind::kConfig, "trials must be >= 1");
}

namespace {

bool HasWhitespace(const std::string &s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
           c == '\f';
  });
}

std::string Where(std::size_t line) {
  return "line " + std::to_string(line) + ": ";
}

const json &Field(const json &obj, const char *key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw Error(ErrorKind::kParse, Where(line) + "missing field '" + key + "'");
  return *it;
}

std::string StringField(const json &obj, const char *key, std::size_t line) {
  const json &v = Field(obj, key, line);
  if (!v.is_string())
    throw Error(ErrorKind::kParse,
                Where(line) + "field '" + key + "' must be a string");
  return v.get<std::string>();
}

Utterance ParseUtterance(const std::string &text, std::size_t line) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kParse, Where(line) + e.what());
  }
  if (!doc.is_object())
    throw Error(ErrorKind::kParse, Where(line) + "expected a JSON object");

  Utterance u;
  u.id = StringField(doc, "id", line);
  u.speaker = StringField(doc, "speaker", line);
  u.intent = StringField(doc, "intent", line);
  try {
    u.split = ParseSplit(StringField(doc, "split", line));
  } catch (const Error &e) {
    throw Error(ErrorKind::kParse, Where(line) + e.what());
  }
  if (auto it = doc.find("audio"); it != doc.end() && !it->is_null()) {
    if (!it->is_string())
      throw Error(ErrorKind::kParse, Where(line) + "'audio' must be string or null");
    u.audio_path = it->get<std::string>();
  }

  const json &phones = Field(doc, "phones", line);
  if (!phones.is_array())
    throw Error(ErrorKind::kParse, Where(line) + "'phones' must be an array");
  for (const json &p : phones) {
    if (!p.is_object())
      throw Error(ErrorKind::kParse, Where(line) + "phone entry must be an object");
    const json &cands = Field(p, "cands", line);
    if (!cands.is_array() || cands.empty())
      throw Error(ErrorKind::kParse,
                  Where(line) + "'cands' must be a non-empty array");
    PhoneToken tok;
    for (const json &c : cands) {
      if (!c.is_array() || c.size() != 2 || !c[0].is_string() ||
          !c[1].is_number())
        throw Error(ErrorKind::kParse,
                    Where(line) + "candidate must be [symbol, logprob]");
      PhoneCandidate cand{c[0].get<std::string>(), c[1].get<double>()};
      if (cand.symbol.empty() || HasWhitespace(cand.symbol))
        throw Error(ErrorKind::kParse, Where(line) + "invalid phone symbol '" +
                                           cand.symbol + "'");
      if (cand.symbol == Vocabulary::kPad)
        throw Error(ErrorKind::kIntegrity,
                    Where(line) + "reserved symbol " + Vocabulary::kPad);
      if (!(cand.logprob <= 0.0))
        throw Error(ErrorKind::kRange, Where(line) + "logprob " +
                                           std::to_string(cand.logprob) +
                                           " for '" + cand.symbol + "' > 0");
      tok.candidates.push_back(std::move(cand));
    }
    try {
      NormalizeToken(tok);
    } catch (const Error &e) {
      throw Error(e.kind(), Where(line) + e.what());
    }
    u.transcript.tokens.push_back(std::move(tok));
  }
  return u;
}

}  // namespace

void NormalizeToken(PhoneToken &token) {
  if (token.candidates.empty())
    throw Error(ErrorKind::kIntegrity, "token without candidates");
  std::sort(token.candidates.begin(), token.candidates.end(),
            [](const PhoneCandidate &a, const PhoneCandidate &b) {
              if (a.logprob != b.logprob) return a.logprob > b.logprob;
              return a.symbol < b.symbol;
            });
  for (std::size_t i = 1; i < token.candidates.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (token.candidates[i].symbol == token.candidates[j].symbol)
        throw Error(ErrorKind::kIntegrity, "duplicate candidate '" +
                                               token.candidates[i].symbol + "'");
}

Dataset ParseDataset(std::string_view text) {
  Dataset ds;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Utterance u = ParseUtterance(line, line_no);
    if (!ids.insert(u.id).second)
      throw Error(ErrorKind::kIntegrity,
                  Where(line_no) + "duplicate utterance id '" + u.id + "'");
    ds.utterances.push_back(std::move(u));
  }
  ds.RebuildVocabulary();
  return ds;
}

Dataset LoadDataset(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return ParseDataset(buf.str());
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

std::string FormatUtterance(const Utterance &utt) {
  nlohmann::ordered_json doc;
  doc["id"] = utt.id;
  doc["speaker"] = utt.speaker;
  doc["intent"] = utt.intent;
  doc["split"] = SplitName(utt.split);
  doc["audio"] = utt.audio_path ? nlohmann::ordered_json(*utt.audio_path)
                                : nlohmann::ordered_json(nullptr);
  auto phones = nlohmann::ordered_json::array();
  std::vector<double> logprobs;
  for (const auto &tok : utt.transcript.tokens) {
    // Symbols keep their list order; logprob values are written in
    // descending order so a promoted candidate stays on top after reload.
    logprobs.clear();
    for (const auto &c : tok.candidates) logprobs.push_back(c.logprob);
    std::sort(logprobs.begin(), logprobs.end(), std::greater<>());
    auto cands = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < tok.candidates.size(); ++k)
      cands.push_back(
          nlohmann::ordered_json::array({tok.candidates[k].symbol, logprobs[k]}));
    phones.push_back({{"cands", std::move(cands)}});
  }
  doc["phones"] = std::move(phones);
  return doc.dump();
}

void SaveDataset(const Dataset &dataset, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  for (const auto &u : dataset.utterances) out << FormatUtterance(u) << '\n';
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

Dataset Subsample(const Dataset &dataset, std::size_t n_intents,
                  std::size_t n_speakers, std::size_t n_recordings,
                  std::uint64_t seed, const SubsampleOptions &options) {
  if (n_intents < 1 || n_speakers < 1 || n_recordings < 1)
    throw Error(ErrorKind::kArgument, "subsample counts must be >= 1");

  // (speaker, intent) -> train utterance indices
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> pairs;
  std::set<std::string> intents, speakers;
  for (std::size_t i = 0; i < dataset.utterances.size(); ++i) {
    const Utterance &u = dataset.utterances[i];
    if (u.split != Split::kTrain) continue;
    intents.insert(u.intent);
    speakers.insert(u.speaker);
    pairs[{u.speaker, u.intent}].push_back(i);
  }
  if (intents.size() < n_intents)
    throw Error(ErrorKind::kCapacity,
                "intents axis: requested " + std::to_string(n_intents) +
                    ", train split has " + std::to_string(intents.size()));
  if (speakers.size() < n_speakers)
    throw Error(ErrorKind::kCapacity,
                "speakers axis: requested " + std::to_string(n_speakers) +
                    ", train split has " + std::to_string(speakers.size()));

  Rng rng(seed);
  std::vector<std::string> chosen_intents =
      rng.Sample(std::vector<std::string>(intents.begin(), intents.end()),
                 n_intents);
  std::sort(chosen_intents.begin(), chosen_intents.end());

  std::vector<std::string> eligible;
  for (const auto &spk : speakers) {
    bool ok = true;
    for (const auto &intent : chosen_intents) {
      auto it = pairs.find({spk, intent});
      if (it == pairs.end() || it->second.size() < n_recordings) {
        ok = false;
        break;
      }
    }
    if (ok) eligible.push_back(spk);
  }
  if (eligible.size() < n_speakers)
    throw Error(ErrorKind::kCapacity,
                "recordings axis: only " + std::to_string(eligible.size()) +
                    " speakers have >= " + std::to_string(n_recordings) +
                    " train recordings for every selected intent, " +
                    std::to_string(n_speakers) + " requested");
  std::vector<std::string> chosen_speakers = rng.Sample(eligible, n_speakers);
  std::sort(chosen_speakers.begin(), chosen_speakers.end());

  std::vector<bool> keep(dataset.utterances.size(), false);
  for (const auto &spk : chosen_speakers) {
    for (const auto &intent : chosen_intents) {
      std::vector<std::size_t> idx = pairs.at({spk, intent});
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return dataset.utterances[a].id < dataset.utterances[b].id;
      });
      for (std::size_t i : rng.Sample(idx, n_recordings)) keep[i] = true;
    }
  }

  std::set<std::string> intent_set(chosen_intents.begin(), chosen_intents.end());
  std::set<std::string> speaker_set(chosen_speakers.begin(),
                                    chosen_speakers.end());
  Dataset out;
  out.vocabulary = dataset.vocabulary;
  for (std::size_t i = 0; i < dataset.utterances.size(); ++i) {
    const Utterance &u = dataset.utterances[i];
    bool take = false;
    if (u.split == Split::kTrain) {
      take = keep[i];
    } else {
      take = intent_set.count(u.intent) != 0 &&
             (!options.eval_selected_speakers_only ||
              speaker_set.count(u.speaker) != 0);
    }
    if (take) out.utterances.push_back(u);
  }
  return out;
}

std::vector<int> Encode(const Transcript &transcript,
                        const Vocabulary &vocabulary) {
  std::vector<int> ids;
  ids.reserve(transcript.tokens.size());
  for (const auto &tok : transcript.tokens) {
    int id = vocabulary.IdOf(tok.Top());
    if (id == Vocabulary::kPadId)
      throw Error(ErrorKind::kVocabulary, "PAD symbol in transcript");
    ids.push_back(id);
  }
  return ids;
}

std::vector<std::string> Decode(std::span<const int> ids,
                                const Vocabulary &vocabulary) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(vocabulary.SymbolOf(id));
  return out;
}

std::vector<std::string> IntentLabels(const Dataset &dataset, Split split) {
  std::set<std::string> labels;
  for (const auto &u : dataset.utterances)
    if (u.split == split) labels.insert(u.intent);
  return {labels.begin(), labels.end()};
}

}  // namespace phonaug

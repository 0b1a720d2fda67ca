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
#include <filesystem>
#include <numbers>
#include <set>

#include "phonaug/error.hpp"
#include "phonaug/harness.hpp"
#include "phonaug/rng.hpp"

namespace phonaug {

namespace {

// Adjacent entries are confusable partners: (a, ə), (e, ɛ), ...
const std::vector<std::string> kAlphabet = {
    "a", "ə", "e", "ɛ", "i", "y", "o", "ɔ", "u", "w", "p", "b", "t", "d", "k",
    "g", "f", "v", "s", "z", "x", "h", "m", "n", "l", "r", "ŋ", "j", "ʃ", "ʒ"};

constexpr std::uint64_t kCanonTag = 1, kAccentTag = 2, kRecTag = 3, kVoiceTag = 4,
                        kLexiconTag = 5;

std::string Label(const char *prefix, std::size_t i, std::size_t n) {
  int width = 2;
  for (std::size_t m = 100; m < n; m *= 10) ++width;
  std::string digits = std::to_string(i);
  if (digits.size() < static_cast<std::size_t>(width))
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + digits;
}

PhoneToken Recognise(std::size_t phone, double confusion, Rng &rng) {
  const std::size_t partner = SyntheticPartner(phone);
  const bool confused = rng.Bernoulli(confusion);
  const double p1 = rng.Uniform(0.5, 0.95);
  const double p2 = (1.0 - p1) * rng.Uniform(0.3, 0.95);
  PhoneToken tok;
  tok.candidates.push_back({kAlphabet[confused ? partner : phone], std::log(p1)});
  tok.candidates.push_back({kAlphabet[confused ? phone : partner], std::log(p2)});
  return tok;
}

}  // namespace

const std::vector<std::string> &SyntheticAlphabet() { return kAlphabet; }

std::size_t SyntheticPartner(std::size_t phone) { return phone ^ 1u; }

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticOptions &opt) {
  if (opt.n_intents < 1 || opt.n_speakers < 1 || opt.n_recordings < 1)
    throw Error(ErrorKind::kArgument, "synthetic corpus counts must be >= 1");
  if (opt.lexicon_size < 2)
    throw Error(ErrorKind::kArgument, "synthetic lexicon needs >= 2 words");
  const std::size_t n_phones = kAlphabet.size();

  // Intents are built from a shared word lexicon so that commands overlap
  // the way spoken robot commands do ("move left" / "move right").
  std::vector<std::vector<std::size_t>> lexicon(opt.lexicon_size);
  for (std::size_t w = 0; w < lexicon.size(); ++w) {
    Rng rng(MixSeed(opt.seed, {kLexiconTag, w}));
    lexicon[w].resize(rng.IntInclusive(3, 4));
    for (auto &p : lexicon[w]) p = rng.Index(n_phones);
  }
  std::vector<std::vector<std::size_t>> canon;
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t i = 0; i < opt.n_intents; ++i) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      Rng rng(MixSeed(opt.seed, {kCanonTag, i, attempt}));
      const std::size_t n_words = rng.IntInclusive(2, 3);
      std::vector<std::size_t> phones;
      for (std::size_t k = 0; k < n_words; ++k) {
        const auto &word = lexicon[rng.Index(lexicon.size())];
        phones.insert(phones.end(), word.begin(), word.end());
      }
      if (seen.insert(phones).second) {
        canon.push_back(std::move(phones));
        break;
      }
    }
  }

  std::vector<std::vector<std::size_t>> accent(opt.n_speakers);
  for (std::size_t s = 0; s < opt.n_speakers; ++s) {
    Rng rng(MixSeed(opt.seed, {kAccentTag, s}));
    accent[s].resize(n_phones);
    for (std::size_t p = 0; p < n_phones; ++p)
      accent[s][p] = rng.Bernoulli(opt.accent_rate) ? SyntheticPartner(p) : p;
  }

  const std::size_t n = opt.n_recordings;
  const std::size_t n_valid = n * 15 / 100;
  const std::size_t n_test = std::max<std::size_t>(1, n * 15 / 100);
  const std::size_t n_train = n > n_valid + n_test ? n - n_valid - n_test : 0;

  SyntheticCorpus out;
  for (std::size_t i = 0; i < opt.n_intents; ++i) {
    const std::string intent = Label("intent", i, opt.n_intents);
    for (std::size_t s = 0; s < opt.n_speakers; ++s) {
      const std::string speaker = Label("spk", s, opt.n_speakers);
      for (std::size_t r = 0; r < n; ++r) {
        Rng rng(MixSeed(opt.seed, {kRecTag, i, s, r}));
        std::vector<std::size_t> spoken;
        for (std::size_t p : canon[i]) {
          if (rng.Bernoulli(opt.deletion_rate)) continue;
          std::size_t q = accent[s][p];
          if (rng.Bernoulli(opt.substitution_rate)) q = rng.Index(n_phones);
          spoken.push_back(q);
        }
        if (spoken.empty()) spoken.push_back(accent[s][canon[i].front()]);

        Utterance u;
        u.id = intent + "_" + speaker + "_" + Label("r", r, n);
        u.speaker = speaker;
        u.intent = intent;
        u.split = r < n_train ? Split::kTrain
                  : r < n_train + n_valid ? Split::kValid
                                          : Split::kTest;
        Utterance v = u;
        for (std::size_t q : spoken)
          u.transcript.tokens.push_back(Recognise(q, opt.recognizer_confusion, rng));

        Rng vrng(MixSeed(opt.seed, {kVoiceTag, i, s, r}));
        for (std::size_t q : spoken) {
          if (vrng.Bernoulli(opt.substitution_rate)) q = vrng.Index(n_phones);
          v.transcript.tokens.push_back(Recognise(q, opt.voice_confusion, vrng));
        }
        out.clean.utterances.push_back(std::move(u));
        out.voice.utterances.push_back(std::move(v));
      }
    }
  }
  out.clean.RebuildVocabulary();
  out.voice.RebuildVocabulary();
  return out;
}

Waveform RenderTonal(const Transcript &transcript, int sample_rate) {
  const auto &alphabet = SyntheticAlphabet();
  const auto seg = static_cast<std::size_t>(sample_rate * 0.08);
  const auto fade = static_cast<std::size_t>(sample_rate * 0.005);
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.reserve(seg * transcript.size());
  for (const auto &tok : transcript.tokens) {
    auto it = std::find(alphabet.begin(), alphabet.end(), tok.Top());
    const auto k = static_cast<double>(
        it == alphabet.end() ? alphabet.size() : it - alphabet.begin());
    const double f1 = 200.0 + 40.0 * k, f2 = 1200.0 + 90.0 * k;
    for (std::size_t n = 0; n < seg; ++n) {
      const double t = static_cast<double>(n) / sample_rate;
      double env = 1.0;
      if (n < fade) env = static_cast<double>(n) / fade;
      if (seg - n <= fade) env = static_cast<double>(seg - n - 1) / fade;
      w.samples.push_back(env * 0.3 *
                          (std::sin(2 * std::numbers::pi * f1 * t) +
                           std::sin(2 * std::numbers::pi * f2 * t)));
    }
  }
  return w;
}

void WriteTonalWavs(Dataset &dataset, const std::string &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create '" + dir + "': " + ec.message());
  for (auto &u : dataset.utterances) {
    const std::string path = (std::filesystem::path(dir) / (u.id + ".wav")).string();
    WriteWav(path, RenderTonal(u.transcript));
    u.audio_path = path;
  }
}

}  // namespace phonaug

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
#include <functional>
#include <map>
#include <set>

#include "doctest.h"
#include "phonaug/corpus.hpp"
#include "phonaug/error.hpp"
#include "phonaug/harness.hpp"
#include "test_util.hpp"

using namespace phonaug;
using phonaug::testing::TempDir;

namespace {

std::string Line(const std::string &id, const std::string &speaker,
                 const std::string &intent, const std::string &split,
                 const std::string &phones) {
  return R"({"id":")" + id + R"(","speaker":")" + speaker + R"(","intent":")" +
         intent + R"(","split":")" + split + R"(","audio":null,"phones":)" +
         phones + "}\n";
}

ErrorKind KindOf(const std::function<void()> &fn, std::string *message = nullptr) {
  try {
    fn();
  } catch (const Error &e) {
    if (message) *message = e.what();
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kIo;
}

void CheckClosure(const Dataset &d) {
  for (const auto &u : d.utterances)
    for (const auto &tok : u.transcript.tokens)
      for (const auto &c : tok.candidates) {
        CHECK(d.vocabulary.Contains(c.symbol));
        CHECK(c.symbol != Vocabulary::kPad);
      }
}

std::vector<std::string> Ids(const Dataset &d, Split split) {
  std::vector<std::string> ids;
  for (const auto *u : d.SplitView(split)) ids.push_back(u->id);
  return ids;
}

}  // namespace

TEST_CASE("load: two lines build the symbol union plus PAD") {
  TempDir dir;
  const std::string path = dir / "two.jsonl";
  phonaug::testing::WriteFile(
      path, Line("u1", "s1", "up", "train", R"([{"cands":[["a",-0.1],["b",-2.0]]}])") +
                Line("u2", "s2", "down", "test", R"([{"cands":[["c",-0.3]]},{"cands":[["a",-0.2]]}])"));
  Dataset d = LoadDataset(path);
  REQUIRE(d.utterances.size() == 2);
  CHECK(d.utterances[0].id == "u1");
  CHECK(d.utterances[1].split == Split::kTest);
  CHECK(d.vocabulary.symbols() == std::vector<std::string>{"<pad>", "a", "b", "c"});
  CHECK(d.vocabulary.IdOf("<pad>") == 0);
  CheckClosure(d);
}

TEST_CASE("load: empty file gives only PAD") {
  Dataset d = ParseDataset("");
  CHECK(d.utterances.empty());
  CHECK(d.vocabulary.size() == 1);
  CHECK(d.vocabulary.SymbolOf(0) == "<pad>");
}

TEST_CASE("load: candidates are re-sorted by descending logprob") {
  Dataset d = ParseDataset(
      Line("u", "s", "i", "train", R"([{"cands":[["a",-2.0],["b",-0.5]]}])"));
  const auto &c = d.utterances[0].transcript.tokens[0].candidates;
  CHECK(c[0] == PhoneCandidate{"b", -0.5});
  CHECK(c[1] == PhoneCandidate{"a", -2.0});
}

TEST_CASE("load: equal logprobs are ordered by symbol") {
  Dataset d = ParseDataset(
      Line("u", "s", "i", "train", R"([{"cands":[["z",-1.0],["m",-1.0],["q",-0.1]]}])"));
  auto syms = d.utterances[0].transcript.tokens[0].candidates;
  CHECK(syms[0].symbol == "q");
  CHECK(syms[1].symbol == "m");
  CHECK(syms[2].symbol == "z");
}

TEST_CASE("load: errors carry kind and line number") {
  const std::string ok = Line("u1", "s", "i", "train", R"([{"cands":[["a",-0.1]]}])");
  std::string msg;
  CHECK(KindOf([&] { ParseDataset(ok + "{not json\n"); }, &msg) == ErrorKind::kParse);
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(KindOf([&] { ParseDataset(ok + ok); }, &msg) == ErrorKind::kIntegrity);
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(KindOf([&] {
          ParseDataset(Line("u", "s", "i", "train", R"([{"cands":[["a",0.5]]}])"));
        }) == ErrorKind::kRange);
  CHECK(KindOf([&] {
          ParseDataset(Line("u", "s", "i", "dev", R"([{"cands":[["a",-0.5]]}])"));
        }) == ErrorKind::kParse);
  CHECK(KindOf([&] {
          ParseDataset(Line("u", "s", "i", "train", R"([{"cands":[]}])"));
        }) == ErrorKind::kParse);
  CHECK(KindOf([&] {
          ParseDataset(Line("u", "s", "i", "train", R"([{"cands":[["a",-0.5],["a",-1]]}])"));
        }) == ErrorKind::kIntegrity);
  CHECK(KindOf([&] { LoadDataset("/nonexistent/file.jsonl"); }) == ErrorKind::kIo);
}

TEST_CASE("save then load reproduces the dataset") {
  SyntheticOptions opt;
  opt.n_intents = 3;
  opt.n_speakers = 2;
  opt.n_recordings = 4;
  opt.seed = 5;
  Dataset d = GenerateSyntheticCorpus(opt).clean;
  TempDir dir;
  SaveDataset(d, dir / "d.jsonl");
  Dataset back = LoadDataset(dir / "d.jsonl");
  CHECK(back.utterances == d.utterances);
  CHECK(back.vocabulary == d.vocabulary);
}

TEST_CASE("subsample: sizes, determinism and capacity") {
  SyntheticOptions opt;  // 36 intents, 11 speakers
  opt.n_recordings = 10;
  opt.seed = 3;
  const Dataset full = GenerateSyntheticCorpus(opt).clean;

  SUBCASE("I=2, S=1, K=1 gives two training utterances") {
    Dataset s = Subsample(full, 2, 1, 1, 9);
    CHECK(s.CountSplit(Split::kTrain) == 2);
  }
  SUBCASE("S=12 exceeds the 11 speakers") {
    std::string msg;
    CHECK(KindOf([&] { Subsample(full, 2, 12, 1, 0); }, &msg) == ErrorKind::kCapacity);
    CHECK(msg.find("speakers") != std::string::npos);
  }
  SUBCASE("too many intents or recordings name their axis") {
    std::string msg;
    CHECK(KindOf([&] { Subsample(full, 37, 1, 1, 0); }, &msg) == ErrorKind::kCapacity);
    CHECK(msg.find("intents") != std::string::npos);
    CHECK(KindOf([&] { Subsample(full, 2, 1, 50, 0); }, &msg) == ErrorKind::kCapacity);
    CHECK(msg.find("recordings") != std::string::npos);
  }
  SUBCASE("same seed twice gives identical ids") {
    CHECK(Ids(Subsample(full, 4, 7, 3, 42), Split::kTrain) ==
          Ids(Subsample(full, 4, 7, 3, 42), Split::kTrain));
  }
  SUBCASE("property: exact I x S x K grid, eval split filtered not downsampled") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      const std::size_t I = 1 + seed % 5, S = 1 + seed % 7, K = 1 + seed % 7;
      Dataset s = Subsample(full, I, S, K, seed);
      std::map<std::pair<std::string, std::string>, int> pair_count;
      std::set<std::string> intents, speakers;
      for (const auto *u : s.SplitView(Split::kTrain)) {
        pair_count[{u->speaker, u->intent}]++;
        intents.insert(u->intent);
        speakers.insert(u->speaker);
      }
      CHECK(intents.size() == I);
      CHECK(speakers.size() == S);
      CHECK(pair_count.size() == I * S);
      for (const auto &[pair, n] : pair_count) CHECK(n == static_cast<int>(K));
      std::size_t expected_test = 0;
      for (const auto &u : full.utterances)
        if (u.split == Split::kTest && intents.count(u.intent)) ++expected_test;
      CHECK(s.CountSplit(Split::kTest) == expected_test);
      CheckClosure(s);
    }
  }
  SUBCASE("evaluation can be restricted to the selected speakers") {
    SubsampleOptions o;
    o.eval_selected_speakers_only = true;
    Dataset s = Subsample(full, 3, 2, 2, 1, o);
    std::set<std::string> speakers;
    for (const auto *u : s.SplitView(Split::kTrain)) speakers.insert(u->speaker);
    for (const auto *u : s.SplitView(Split::kTest)) CHECK(speakers.count(u->speaker) == 1);
  }
}

TEST_CASE("encode and decode") {
  Vocabulary vocab({"b", "a"});
  CHECK(vocab.symbols() == std::vector<std::string>{"<pad>", "a", "b"});
  Transcript t = phonaug::testing::TwoCandidateTranscript({"a", "b", "a"}, "b");
  t.tokens[1] = phonaug::testing::Tok({{"b", -0.1}, {"a", -1.0}});
  CHECK(Encode(t, vocab) == std::vector<int>{1, 2, 1});
  CHECK(Encode(Transcript{}, vocab).empty());
  Transcript bad = phonaug::testing::TwoCandidateTranscript({"x"}, "a");
  CHECK_THROWS_AS(Encode(bad, vocab), Error);
  CHECK(KindOf([&] { Encode(bad, vocab); }) == ErrorKind::kVocabulary);

  // round trip and no PAD over a synthetic corpus
  SyntheticOptions opt;
  opt.n_intents = 5;
  opt.n_speakers = 3;
  opt.n_recordings = 3;
  Dataset d = GenerateSyntheticCorpus(opt).clean;
  for (const auto &u : d.utterances) {
    auto ids = Encode(u.transcript, d.vocabulary);
    CHECK(ids.size() == u.transcript.size());
    CHECK(std::find(ids.begin(), ids.end(), 0) == ids.end());
    CHECK(Decode(ids, d.vocabulary) == u.transcript.TopSymbols());
  }
}

TEST_CASE("grid spec validation") {
  GridSpec g;
  CHECK_NOTHROW(g.Validate());
  g.trials = 0;
  CHECK_THROWS_AS(g.Validate(), Error);
  g.trials = 1;
  g.recordings_counts = {0};
  CHECK_THROWS_AS(g.Validate(), Error);
}

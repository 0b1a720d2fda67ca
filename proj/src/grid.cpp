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
#include <atomic>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <tuple>

#include "phonaug/error.hpp"
#include "phonaug/harness.hpp"
#include "phonaug/rng.hpp"

namespace phonaug {

namespace {

constexpr std::uint64_t kSubsampleTag = 0x53554253;  // "SUBS"

using CellKey = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;

struct Cell {
  Method method;
  std::size_t intents, speakers, recordings, trial;
};

// Baseline outcome of one (I, S, K, trial) cell, shared with similar_phone,
// which derives its phone map from the trained baseline.
struct BaselineSlot {
  std::once_flag once;
  double accuracy = 0.0;
  SimilarityMap map;
};

std::string CellName(const Cell &c) {
  return "cell (method=" + std::string(MethodName(c.method)) +
         ", I=" + std::to_string(c.intents) + ", S=" + std::to_string(c.speakers) +
         ", K=" + std::to_string(c.recordings) + ", trial=" + std::to_string(c.trial) +
         ")";
}

SimilarityMap MapFromModel(const Model &model) {
  auto vectors = ExtractPhoneVectors(model, model.vocabulary());
  // an all-zero ReLU output has no direction; such phones stay unmapped
  std::erase_if(vectors, [](const auto &kv) {
    return std::all_of(kv.second.begin(), kv.second.end(),
                       [](double v) { return v == 0.0; });
  });
  return BuildSimilarityMap(vectors);
}

}  // namespace

std::uint64_t CellSeed(std::uint64_t base, Method method, std::size_t intents,
                       std::size_t speakers, std::size_t recordings,
                       std::size_t trial) {
  return MixSeed(base, {MethodIndex(method), intents, speakers, recordings, trial});
}

std::uint64_t SubsampleSeed(std::uint64_t base, std::size_t intents,
                            std::size_t speakers, std::size_t recordings,
                            std::size_t trial) {
  return MixSeed(base, {kSubsampleTag, intents, speakers, recordings, trial});
}

void SortRows(std::vector<ResultRow> &rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow &a, const ResultRow &b) {
    const std::string ma = MethodName(a.method), mb = MethodName(b.method);
    return std::tie(ma, a.intents, a.speakers, a.recordings, a.trial) <
           std::tie(mb, b.intents, b.speakers, b.recordings, b.trial);
  });
}

std::vector<ResultRow> RunGrid(const Dataset &dataset, const GridSpec &grid,
                               const GridOptions &options, const Dataset *voice) {
  grid.Validate();
  if (options.methods.empty())
    throw Error(ErrorKind::kConfig, "grid needs at least one method");
  std::vector<Method> methods = options.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  for (Method m : methods) {
    TrainConfig probe = options.train;
    probe.method = m;
    probe.Validate();
    if (UsesVoice(m) && voice == nullptr)
      throw Error(ErrorKind::kConfig, std::string(MethodName(m)) +
                                          " needs voice-augmented transcripts");
  }

  std::vector<Cell> cells;
  for (Method m : methods)
    for (auto i : grid.intents_counts)
      for (auto s : grid.speakers_counts)
        for (auto k : grid.recordings_counts)
          for (std::size_t t = 0; t < grid.trials; ++t) cells.push_back({m, i, s, k, t});

  std::mutex slots_mu;
  std::map<CellKey, std::shared_ptr<BaselineSlot>> slots;
  auto slot_for = [&](const Cell &c) {
    std::lock_guard<std::mutex> lock(slots_mu);
    auto &slot = slots[{c.intents, c.speakers, c.recordings, c.trial}];
    if (!slot) slot = std::make_shared<BaselineSlot>();
    return slot;
  };

  auto run_cell = [&](const Cell &c) -> ResultRow {
    Dataset sub;
    try {
      sub = Subsample(dataset, c.intents, c.speakers, c.recordings,
                      SubsampleSeed(grid.base_seed, c.intents, c.speakers,
                                    c.recordings, c.trial),
                      options.subsample);
    } catch (const Error &e) {
      throw Error(e.kind(), CellName(c) + ": " + e.what());
    }
    ResultRow row{c.method, c.intents, c.speakers, c.recordings, c.trial,
                  CellSeed(grid.base_seed, c.method, c.intents, c.speakers,
                           c.recordings, c.trial),
                  0.0};

    if (c.method == Method::kBaseline || c.method == Method::kSimilarPhone) {
      auto slot = slot_for(c);
      std::call_once(slot->once, [&] {
        TrainConfig cfg = options.train;
        cfg.method = Method::kBaseline;
        cfg.seed = CellSeed(grid.base_seed, Method::kBaseline, c.intents,
                            c.speakers, c.recordings, c.trial);
        TrainResult tr = TrainFromScratch(options.model, sub, cfg);
        slot->accuracy = Evaluate(tr.model, sub, Split::kTest);
        if (std::find(methods.begin(), methods.end(), Method::kSimilarPhone) !=
            methods.end())
          slot->map = MapFromModel(tr.model);
      });
      if (c.method == Method::kBaseline) {
        row.accuracy = slot->accuracy;
        return row;
      }
      TrainConfig cfg = options.train;
      cfg.method = c.method;
      cfg.seed = row.seed;
      TrainResult tr = TrainFromScratch(options.model, sub, cfg, &slot->map);
      row.accuracy = Evaluate(tr.model, sub, Split::kTest);
      return row;
    }

    TrainConfig cfg = options.train;
    cfg.method = c.method;
    cfg.seed = row.seed;
    TrainResult tr = TrainFromScratch(options.model, sub, cfg, nullptr, voice);
    row.accuracy = Evaluate(tr.model, sub, Split::kTest);
    return row;
  };

  std::vector<ResultRow> rows(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        rows[i] = run_cell(cells[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }
  for (const auto &e : errors)
    if (e) std::rethrow_exception(e);

  SortRows(rows);
  return rows;
}

}  // namespace phonaug

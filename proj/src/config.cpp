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

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "phonaug/cli.hpp"
#include "phonaug/error.hpp"

namespace phonaug {

namespace {

using nlohmann::json;

void RejectUnknown(const json &obj, const std::string &where,
                   const std::set<std::string> &known) {
  if (!obj.is_object())
    throw Error(ErrorKind::kConfig, where + " must be a JSON object");
  for (const auto &[key, value] : obj.items())
    if (!known.count(key))
      throw Error(ErrorKind::kConfig, "unknown key '" + key + "' in " + where);
}

template <typename T>
void Read(const json &obj, const char *key, T &dst, const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    dst = it->get<T>();
  } catch (const json::exception &) {
    throw Error(ErrorKind::kConfig,
                "bad value for '" + std::string(key) + "' in " + where);
  }
}

void ReadCount(const json &obj, const char *key, std::size_t &dst,
               const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_integer() || it->get<long long>() < 0)
    throw Error(ErrorKind::kConfig, "'" + std::string(key) + "' in " + where +
                                        " must be a non-negative integer");
  dst = it->get<std::size_t>();
}

}  // namespace

std::uint64_t DefaultSeed() {
  const char *env = std::getenv("PHONAUG_SEED");
  if (env == nullptr || *env == '\0') return 0;
  char *end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw Error(ErrorKind::kConfig, "PHONAUG_SEED must be an unsigned integer");
  return v;
}

CliConfig ParseCliConfig(const std::string &json_text, std::uint64_t default_seed) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kConfig, std::string("config: ") + e.what());
  }
  RejectUnknown(doc, "config", {"model", "train", "aug", "grid"});

  CliConfig cfg;
  cfg.train.seed = default_seed;
  cfg.grid.base_seed = default_seed;

  if (auto it = doc.find("model"); it != doc.end()) {
    const json &m = *it;
    RejectUnknown(m, "model", {"embedding_size", "kernel_size", "n_filters",
                               "lstm_layers", "hidden_size"});
    ReadCount(m, "embedding_size", cfg.model.embedding_size, "model");
    ReadCount(m, "kernel_size", cfg.model.kernel_size, "model");
    ReadCount(m, "n_filters", cfg.model.n_filters, "model");
    ReadCount(m, "lstm_layers", cfg.model.lstm_layers, "model");
    ReadCount(m, "hidden_size", cfg.model.hidden_size, "model");
  }
  // vocabulary and intent count come from the data
  cfg.model.vocab_size = 1;
  cfg.model.n_intents = 1;
  cfg.model.Validate();
  cfg.model.vocab_size = 0;
  cfg.model.n_intents = 0;

  if (auto it = doc.find("train"); it != doc.end()) {
    const json &t = *it;
    RejectUnknown(t, "train", {"epochs", "batch_size", "lr", "beta1", "beta2",
                               "eps", "patience", "method", "seed"});
    ReadCount(t, "epochs", cfg.train.epochs, "train");
    ReadCount(t, "batch_size", cfg.train.batch_size, "train");
    ReadCount(t, "patience", cfg.train.patience, "train");
    Read(t, "lr", cfg.train.adam.lr, "train");
    Read(t, "beta1", cfg.train.adam.beta1, "train");
    Read(t, "beta2", cfg.train.adam.beta2, "train");
    Read(t, "eps", cfg.train.adam.eps, "train");
    Read(t, "seed", cfg.train.seed, "train");
    std::string method = MethodName(cfg.train.method);
    Read(t, "method", method, "train");
    cfg.train.method = ParseMethod(method);
  }

  if (auto it = doc.find("aug"); it != doc.end()) {
    const json &a = *it;
    RejectUnknown(a, "aug", {"noise_swaps", "similar_rate", "use_voice",
                             "expansion_mode", "n_freq_masks", "n_time_masks",
                             "max_freq_width", "max_time_width"});
    Read(a, "noise_swaps", cfg.train.policy.noise_swaps, "aug");
    Read(a, "similar_rate", cfg.train.policy.similar_rate, "aug");
    Read(a, "use_voice", cfg.train.policy.use_voice, "aug");
    std::string mode = ExpansionModeName(cfg.train.policy.expansion_mode);
    Read(a, "expansion_mode", mode, "aug");
    cfg.train.policy.expansion_mode = ParseExpansionMode(mode);
    Read(a, "n_freq_masks", cfg.specaugment.n_freq_masks, "aug");
    Read(a, "n_time_masks", cfg.specaugment.n_time_masks, "aug");
    Read(a, "max_freq_width", cfg.specaugment.max_freq_width, "aug");
    Read(a, "max_time_width", cfg.specaugment.max_time_width, "aug");
    if (cfg.specaugment.n_freq_masks < 0 || cfg.specaugment.n_time_masks < 0 ||
        cfg.specaugment.max_freq_width < 0 || cfg.specaugment.max_time_width < 0)
      throw Error(ErrorKind::kConfig, "SpecAugment settings must be >= 0");
  }
  cfg.train.policy.Validate();

  if (auto it = doc.find("grid"); it != doc.end()) {
    const json &g = *it;
    RejectUnknown(g, "grid", {"intents_counts", "speakers_counts",
                              "recordings_counts", "trials", "base_seed",
                              "methods", "eval_speakers"});
    Read(g, "intents_counts", cfg.grid.intents_counts, "grid");
    Read(g, "speakers_counts", cfg.grid.speakers_counts, "grid");
    Read(g, "recordings_counts", cfg.grid.recordings_counts, "grid");
    ReadCount(g, "trials", cfg.grid.trials, "grid");
    Read(g, "base_seed", cfg.grid.base_seed, "grid");
    if (auto m = g.find("methods"); m != g.end()) {
      std::vector<std::string> names;
      Read(g, "methods", names, "grid");
      cfg.methods.clear();
      for (const auto &n : names) cfg.methods.push_back(ParseMethod(n));
    }
    std::string eval = "all";
    Read(g, "eval_speakers", eval, "grid");
    if (eval != "all" && eval != "selected")
      throw Error(ErrorKind::kConfig, "eval_speakers must be 'all' or 'selected'");
    cfg.subsample.eval_selected_speakers_only = eval == "selected";
  }
  cfg.grid.Validate();
  return cfg;
}

CliConfig LoadCliConfig(const std::string &path, std::uint64_t default_seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return ParseCliConfig(buf.str(), default_seed);
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

}  // namespace phonaug

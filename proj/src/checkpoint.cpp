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

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"
#include "phonaug/error.hpp"
#include "phonaug/model.hpp"

namespace phonaug {

namespace {

constexpr char kMagic[] = "PHAUG1";
constexpr std::size_t kMagicLen = 6;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void PutU64(std::vector<std::uint8_t> &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t GetU64(const std::uint8_t *p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

nlohmann::ordered_json ConfigJson(const ModelConfig &c) {
  return {{"vocab_size", c.vocab_size},   {"embedding_size", c.embedding_size},
          {"kernel_size", c.kernel_size}, {"n_filters", c.n_filters},
          {"lstm_layers", c.lstm_layers}, {"hidden_size", c.hidden_size},
          {"n_intents", c.n_intents}};
}

}  // namespace

std::vector<std::uint8_t> SerializeCheckpoint(const Model &model) {
  nlohmann::ordered_json header;
  header["config"] = ConfigJson(model.config());
  auto layers = nlohmann::ordered_json::array();
  for (const auto &spec : model.LayerSpecs())
    layers.push_back({{"kind", nn::LayerKindName(spec.kind)}, {"dims", spec.dims}});
  header["layers"] = std::move(layers);
  header["intent_labels"] = model.intent_labels();
  header["vocabulary"] = model.vocabulary().symbols();
  auto params = nlohmann::ordered_json::array();
  for (const auto *p : model.Parameters())
    params.push_back({{"name", p->name}, {"shape", p->value.shape}});
  header["parameters"] = std::move(params);
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(kMagic, kMagic + kMagicLen);
  PutU64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  for (const auto *p : model.Parameters()) {
    const std::size_t offset = out.size();
    out.resize(offset + p->value.size() * sizeof(double));
    std::memcpy(out.data() + offset, p->value.values.data(),
                p->value.size() * sizeof(double));
  }
  return out;
}

Model DeserializeCheckpoint(const std::vector<std::uint8_t> &bytes) {
  if (bytes.size() < kMagicLen + 8 ||
      std::memcmp(bytes.data(), kMagic, kMagicLen) != 0)
    throw Error(ErrorKind::kFormat, "not a PHAUG1 checkpoint");
  const std::uint64_t header_len = GetU64(bytes.data() + kMagicLen);
  const std::size_t body = kMagicLen + 8;
  if (header_len > bytes.size() - body)
    throw Error(ErrorKind::kFormat, "truncated checkpoint header");

  nlohmann::json header;
  ModelConfig cfg;
  std::vector<std::string> labels, symbols;
  try {
    header = nlohmann::json::parse(bytes.begin() + body,
                                   bytes.begin() + body + header_len);
    const auto &c = header.at("config");
    cfg.vocab_size = c.at("vocab_size").get<std::size_t>();
    cfg.embedding_size = c.at("embedding_size").get<std::size_t>();
    cfg.kernel_size = c.at("kernel_size").get<std::size_t>();
    cfg.n_filters = c.at("n_filters").get<std::size_t>();
    cfg.lstm_layers = c.at("lstm_layers").get<std::size_t>();
    cfg.hidden_size = c.at("hidden_size").get<std::size_t>();
    cfg.n_intents = c.at("n_intents").get<std::size_t>();
    labels = header.at("intent_labels").get<std::vector<std::string>>();
    symbols = header.at("vocabulary").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, std::string("checkpoint header: ") + e.what());
  }
  Vocabulary vocab(symbols);
  if (vocab.symbols() != symbols)
    throw Error(ErrorKind::kFormat, "checkpoint vocabulary is not canonical");

  Model model(cfg, vocab, labels);
  std::size_t pos = body + header_len;
  for (auto *p : model.Parameters()) {
    const std::size_t n = p->value.size() * sizeof(double);
    if (bytes.size() - pos < n)
      throw Error(ErrorKind::kFormat, "truncated parameter '" + p->name + "'");
    std::memcpy(p->value.values.data(), bytes.data() + pos, n);
    pos += n;
  }
  if (pos != bytes.size())
    throw Error(ErrorKind::kFormat, "trailing bytes after parameters");
  return model;
}

void SaveCheckpoint(const Model &model, const std::string &path) {
  const auto bytes = SerializeCheckpoint(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

Model LoadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return DeserializeCheckpoint(bytes);
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

}  // namespace phonaug

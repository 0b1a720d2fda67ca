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
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "phonaug/augment.hpp"
#include "phonaug/cli.hpp"
#include "phonaug/error.hpp"
#include "phonaug/rng.hpp"

namespace phonaug {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int ExitCodeFor(ErrorKind kind) {
  return kind == ErrorKind::kConfig || kind == ErrorKind::kArgument ? kExitUsage
                                                                     : kExitRuntime;
}

struct SynthArgs {
  std::size_t intents = 0, speakers = 0, recordings = 0;
  std::uint64_t seed = 0;
  std::string out, wav_dir, voice_out;
};

struct AudioArgs {
  std::string in, out, config;
  std::uint64_t seed = 0;
  std::optional<double> speed, gain;
  bool specaugment = false;
};

struct PhonesArgs {
  std::string in, out, mode, map;
  int swaps = 1;
  double rate = 0.1;
  std::uint64_t seed = 0;
};

struct SimmapArgs {
  std::string model, data, out;
};

struct TrainArgs {
  std::string config, data, out, voice_data, map, history;
};

struct EvalArgs {
  std::string model, data, split = "test";
};

struct GridArgs {
  std::string config, data, out_csv, out_svg, voice_data;
  std::size_t jobs = 1;
};

int RunSynth(const SynthArgs &a, std::ostream &out) {
  SyntheticOptions opt;
  opt.n_intents = a.intents;
  opt.n_speakers = a.speakers;
  opt.n_recordings = a.recordings;
  opt.seed = a.seed;
  SyntheticCorpus corpus = GenerateSyntheticCorpus(opt);
  if (!a.wav_dir.empty()) WriteTonalWavs(corpus.clean, a.wav_dir);
  SaveDataset(corpus.clean, a.out);
  if (!a.voice_out.empty()) SaveDataset(corpus.voice, a.voice_out);
  out << "wrote " << corpus.clean.utterances.size() << " utterances to " << a.out
      << "\n";
  return kExitOk;
}

int RunAugmentAudio(const AudioArgs &a, std::ostream &out) {
  SpecAugmentConfig sa_cfg;
  if (!a.config.empty()) sa_cfg = LoadCliConfig(a.config, a.seed).specaugment;

  Waveform w = ReadWav(a.in);
  if (a.speed || a.gain) {
    if (a.speed) w = ChangeSpeed(w, *a.speed);
    if (a.gain) w = ApplyGainDb(w, *a.gain);
  } else {
    w = VoiceAugment(w, a.seed);
  }
  if (a.specaugment) {
    const MelSpec mel = MelSpectrogram(w);
    sa_cfg.max_freq_width = std::min(sa_cfg.max_freq_width, mel.n_mels);
    sa_cfg.max_time_width =
        std::min(sa_cfg.max_time_width, static_cast<int>(mel.num_frames()));
    w = InvertSpectrogram(SpecAugment(mel, sa_cfg, MixSeed(a.seed, {1})));
  }
  WriteWav(a.out, w);
  out << "wrote " << w.samples.size() << " samples to " << a.out << "\n";
  return kExitOk;
}

int RunAugmentPhones(const PhonesArgs &a, std::ostream &out, std::ostream &err) {
  AugmentPolicy policy;
  policy.expansion_mode = ExpansionMode::kAppend;
  std::optional<SimilarityMap> map;
  if (a.mode == "noise") {
    policy.noise_swaps = a.swaps;
  } else {
    if (a.map.empty()) {
      err << "augment-phones: --mode similar requires --map\n";
      return kExitRuntime;
    }
    policy.similar_rate = a.rate;
    map = LoadSimilarityMap(a.map);
  }
  const Dataset in = LoadDataset(a.in);
  const Dataset expanded = ExpandDataset(in, policy, map, a.seed);
  SaveDataset(expanded, a.out);
  out << "wrote " << expanded.utterances.size() << " utterances to " << a.out << "\n";
  return kExitOk;
}

int RunSimmap(const SimmapArgs &a, std::ostream &out) {
  const Model model = LoadCheckpoint(a.model);
  const Dataset data = LoadDataset(a.data);
  const SimilarityMap map = BuildSimilarityMap(ExtractPhoneVectors(model, data.vocabulary));
  SaveSimilarityMap(map, a.out);
  out << "wrote " << map.neighbor.size() << " phone neighbours to " << a.out << "\n";
  return kExitOk;
}

int RunTrain(const TrainArgs &a, std::ostream &out) {
  const CliConfig cfg = LoadCliConfig(a.config, DefaultSeed());
  cfg.train.Validate();
  const Dataset data = LoadDataset(a.data);
  std::optional<Dataset> voice;
  if (!a.voice_data.empty()) voice = LoadDataset(a.voice_data);
  std::optional<SimilarityMap> map;
  if (!a.map.empty()) map = LoadSimilarityMap(a.map);

  const TrainResult result = TrainFromScratch(cfg.model, data, cfg.train,
                                              map ? &*map : nullptr,
                                              voice ? &*voice : nullptr);
  SaveCheckpoint(result.model, a.out);
  if (!a.history.empty()) {
    std::ofstream h(a.history, std::ios::binary | std::ios::trunc);
    if (!h) throw Error(ErrorKind::kIo, "cannot write '" + a.history + "'");
    h << "epoch,train_loss,monitor_accuracy,monitor_loss\n";
    char buf[128];
    for (const auto &e : result.history) {
      std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f\n", e.epoch, e.train_loss,
                    e.monitor_accuracy, e.monitor_loss);
      h << buf;
    }
  }
  out << "trained " << result.history.size() << " epochs (best epoch "
      << result.best_epoch << "), wrote " << a.out << "\n";
  return kExitOk;
}

int RunEval(const EvalArgs &a, std::ostream &out) {
  const Model model = LoadCheckpoint(a.model);
  const Dataset data = LoadDataset(a.data);
  const double acc = Evaluate(model, data, ParseSplit(a.split));
  char buf[64];
  std::snprintf(buf, sizeof buf, "accuracy=%.6f\n", acc);
  out << buf;
  return kExitOk;
}

int RunGridCommand(const GridArgs &a, std::ostream &out) {
  const CliConfig cfg = LoadCliConfig(a.config, DefaultSeed());
  const Dataset data = LoadDataset(a.data);
  std::optional<Dataset> voice;
  if (!a.voice_data.empty()) voice = LoadDataset(a.voice_data);

  GridOptions options;
  options.methods = cfg.methods;
  options.model = cfg.model;
  options.train = cfg.train;
  options.subsample = cfg.subsample;
  options.jobs = a.jobs;
  const auto rows = RunGrid(data, cfg.grid, options, voice ? &*voice : nullptr);
  EmitCsv(rows, a.out_csv);
  if (!a.out_svg.empty()) EmitSvg(rows, a.out_svg);
  out << "wrote " << rows.size() << " result rows to " << a.out_csv << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err) {
  std::uint64_t default_seed = 0;
  try {
    default_seed = DefaultSeed();
  } catch (const Error &e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"Phoneme-level augmentation and intent classification toolkit",
               "phonaug"};
  app.require_subcommand(1);

  SynthArgs synth;
  synth.seed = default_seed;
  auto *synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth_cmd->add_option("--intents", synth.intents)->required()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--speakers", synth.speakers)->required()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--recordings", synth.recordings)->required()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--out", synth.out, "Transcript JSONL output")->required();
  synth_cmd->add_option("--wav-dir", synth.wav_dir, "Also render tonal WAVs here");
  synth_cmd->add_option("--voice-out", synth.voice_out,
                        "Transcripts of the voice-augmented recordings");

  AudioArgs audio;
  audio.seed = default_seed;
  auto *audio_cmd = app.add_subcommand("augment-audio", "Voice-level augmentation");
  audio_cmd->add_option("--in", audio.in)->required();
  audio_cmd->add_option("--out", audio.out)->required();
  audio_cmd->add_option("--seed", audio.seed);
  audio_cmd->add_option("--speed", audio.speed, "Explicit speed factor");
  audio_cmd->add_option("--gain", audio.gain, "Explicit gain in dB");
  audio_cmd->add_flag("--specaugment", audio.specaugment);
  audio_cmd->add_option("--config", audio.config, "JSON config (aug section)");

  PhonesArgs phones;
  phones.seed = default_seed;
  auto *phones_cmd = app.add_subcommand("augment-phones", "Phoneme-level expansion");
  phones_cmd->add_option("--in", phones.in)->required();
  phones_cmd->add_option("--out", phones.out)->required();
  phones_cmd->add_option("--mode", phones.mode)
      ->required()
      ->check(CLI::IsMember({"noise", "similar"}));
  phones_cmd->add_option("--swaps", phones.swaps)->check(CLI::Range(1, 2));
  phones_cmd->add_option("--rate", phones.rate)->check(CLI::Range(0.0, 1.0));
  phones_cmd->add_option("--map", phones.map);
  phones_cmd->add_option("--seed", phones.seed);

  SimmapArgs simmap;
  auto *simmap_cmd = app.add_subcommand("simmap", "Build the similar-phone map");
  simmap_cmd->add_option("--model", simmap.model)->required();
  simmap_cmd->add_option("--data", simmap.data)->required();
  simmap_cmd->add_option("--out", simmap.out)->required();

  TrainArgs train;
  auto *train_cmd = app.add_subcommand("train", "Train a classifier");
  train_cmd->add_option("--config", train.config)->required();
  train_cmd->add_option("--data", train.data)->required();
  train_cmd->add_option("--out", train.out)->required();
  train_cmd->add_option("--voice-data", train.voice_data);
  train_cmd->add_option("--map", train.map);
  train_cmd->add_option("--history", train.history, "Per-epoch CSV");

  EvalArgs eval;
  auto *eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--model", eval.model)->required();
  eval_cmd->add_option("--data", eval.data)->required();
  eval_cmd->add_option("--split", eval.split)
      ->check(CLI::IsMember({"train", "valid", "test"}));

  GridArgs grid;
  auto *grid_cmd = app.add_subcommand("grid", "Run the experiment grid");
  grid_cmd->add_option("--config", grid.config)->required();
  grid_cmd->add_option("--data", grid.data)->required();
  grid_cmd->add_option("--out-csv", grid.out_csv)->required();
  grid_cmd->add_option("--out-svg", grid.out_svg);
  grid_cmd->add_option("--voice-data", grid.voice_data);
  grid_cmd->add_option("--jobs", grid.jobs)->check(CLI::PositiveNumber);

  std::vector<std::string> argv_storage{"phonaug"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char *> argv;
  for (auto &s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp &e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return RunSynth(synth, out);
    if (audio_cmd->parsed()) return RunAugmentAudio(audio, out);
    if (phones_cmd->parsed()) return RunAugmentPhones(phones, out, err);
    if (simmap_cmd->parsed()) return RunSimmap(simmap, out);
    if (train_cmd->parsed()) return RunTrain(train, out);
    if (eval_cmd->parsed()) return RunEval(eval, out);
    if (grid_cmd->parsed()) return RunGridCommand(grid, out);
  } catch (const Error &e) {
    err << "phonaug: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception &e) {
    err << "phonaug: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace phonaug

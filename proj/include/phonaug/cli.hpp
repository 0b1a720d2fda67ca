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

#include <iosfwd>
#include <string>
#include <vector>

#include "phonaug/audio.hpp"
#include "phonaug/harness.hpp"

namespace phonaug {

// JSON run configuration with sections "model", "train", "aug" and "grid".
// Unknown keys are rejected; missing keys keep their defaults.
struct CliConfig {
  ModelConfig model;
  TrainConfig train;  // train.policy holds the "aug" phoneme settings
  SpecAugmentConfig specaugment;
  GridSpec grid;
  std::vector<Method> methods{Method::kBaseline};
  SubsampleOptions subsample;
};

CliConfig ParseCliConfig(const std::string &json_text,
                         std::uint64_t default_seed = 0);
CliConfig LoadCliConfig(const std::string &path, std::uint64_t default_seed = 0);

// Seed used when --seed is absent: $PHONAUG_SEED, else 0.
std::uint64_t DefaultSeed();

// Entry point of the phonaug executable. Exit status: 0 success, 1 runtime or
// data error, 2 usage or configuration error.
int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err);

}  // namespace phonaug

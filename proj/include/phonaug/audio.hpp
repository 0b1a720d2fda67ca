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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace phonaug {

struct Waveform {
  std::vector<double> samples;  // each in [-1, 1]
  int sample_rate = 16000;

  bool operator==(const Waveform &) const = default;
};

// RIFF / PCM 16-bit / mono only. Samples are raw values / 32768.
Waveform ReadWav(const std::string &path);
Waveform ParseWav(const std::vector<std::uint8_t> &bytes);
void WriteWav(const std::string &path, const Waveform &wave);
std::vector<std::uint8_t> SerializeWav(const Waveform &wave);

// Linear-interpolation resampling at the same nominal rate; output length is
// round(len / factor) and pitch moves with speed.
Waveform ChangeSpeed(const Waveform &wave, double factor);

// Multiplies by 10^(db/20) and hard-clamps to [-1, 1].
Waveform ApplyGainDb(const Waveform &wave, double db);

enum class VoiceVariant { kSpeed, kGain, kSpeedThenGain };

inline constexpr double kVoiceSpeedFactor = 1.6;
inline constexpr double kVoiceGainDb = 5.0;

VoiceVariant ChooseVoiceVariant(std::uint64_t seed);
Waveform ApplyVoiceVariant(const Waveform &wave, VoiceVariant variant);
// Seeded uniform choice among the three variants above.
Waveform VoiceAugment(const Waveform &wave, std::uint64_t seed);

struct MelConfig {
  int n_mels = 80;
  int fft_size = 512;
  int win = 400;
  int hop = 160;

  void Validate() const;
};

// Time-major log-mel energies: frames[t][m].
struct MelSpec {
  std::vector<std::vector<double>> frames;
  int n_mels = 0;
  int hop = 0;
  int win = 0;
  int fft_size = 0;
  int sample_rate = 0;

  std::size_t num_frames() const { return frames.size(); }
  double Mean() const;
  bool operator==(const MelSpec &) const = default;
};

inline constexpr double kLogFloor = 1e-10;

// Slaney mel scale (linear below 1 kHz, logarithmic above).
double HzToMel(double hz);
double MelToHz(double mel);

// n_mels x (fft_size/2 + 1) triangular filters spanning 0..sample_rate/2 with
// Slaney area normalisation.
std::vector<std::vector<double>> MelFilterbank(int sample_rate, int fft_size,
                                               int n_mels);

// Periodic Hann window.
std::vector<double> HannWindow(int length);

// In-place iterative radix-2 FFT; size must be a power of two.
void Fft(std::vector<std::complex<double>> &data, bool inverse = false);

MelSpec MelSpectrogram(const Waveform &wave, const MelConfig &cfg = {});

struct SpecAugmentConfig {
  int n_freq_masks = 1;
  int n_time_masks = 1;
  int max_freq_width = 8;
  int max_time_width = 10;
};

// Mask draws in order: every frequency mask (width, then start), then every
// time mask (width, then start). Masked cells take the input's mean value.
MelSpec SpecAugment(const MelSpec &spec, const SpecAugmentConfig &cfg,
                    std::uint64_t seed);

inline constexpr int kGriffinLimIterations = 32;

// Mel pseudo-inverse followed by Griffin-Lim phase estimation. Output length
// is (frames - 1) * hop + win.
Waveform InvertSpectrogram(const MelSpec &spec,
                           int iterations = kGriffinLimIterations);

}  // namespace phonaug

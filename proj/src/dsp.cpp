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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "phonaug/audio.hpp"
#include "phonaug/error.hpp"
#include "phonaug/rng.hpp"

namespace phonaug {

namespace {

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

constexpr double kMelLinearStep = 200.0 / 3.0;
constexpr double kMelLogBreakHz = 1000.0;
constexpr double kMelLogBreak = kMelLogBreakHz / kMelLinearStep;  // 15

double MelLogStep() { return std::log(6.4) / 27.0; }

// Windowed, zero-padded frame spectra (bins 0..fft_size/2).
std::vector<std::vector<std::complex<double>>> Stft(
    const std::vector<double> &samples, int fft_size, int win, int hop,
    const std::vector<double> &window) {
  std::vector<std::vector<std::complex<double>>> out;
  if (samples.size() < static_cast<std::size_t>(win)) return out;
  const std::size_t n_frames = 1 + (samples.size() - win) / hop;
  const int n_bins = fft_size / 2 + 1;
  std::vector<std::complex<double>> buf(fft_size);
  out.reserve(n_frames);
  for (std::size_t t = 0; t < n_frames; ++t) {
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    const std::size_t start = t * hop;
    for (int i = 0; i < win; ++i) buf[i] = samples[start + i] * window[i];
    Fft(buf);
    out.emplace_back(buf.begin(), buf.begin() + n_bins);
  }
  return out;
}

std::vector<double> Istft(
    const std::vector<std::vector<std::complex<double>>> &spectra,
    int fft_size, int win, int hop, const std::vector<double> &window) {
  const std::size_t n_frames = spectra.size();
  const std::size_t length = (n_frames - 1) * hop + win;
  std::vector<double> out(length, 0.0), norm(length, 0.0);
  std::vector<std::complex<double>> buf(fft_size);
  const int half = fft_size / 2;
  for (std::size_t t = 0; t < n_frames; ++t) {
    const auto &spec = spectra[t];
    for (int k = 0; k <= half; ++k) buf[k] = spec[k];
    for (int k = half + 1; k < fft_size; ++k) buf[k] = std::conj(spec[fft_size - k]);
    buf[0] = buf[0].real();
    buf[half] = buf[half].real();
    Fft(buf, /*inverse=*/true);
    const std::size_t start = t * hop;
    for (int i = 0; i < win; ++i) {
      out[start + i] += buf[i].real() * window[i];
      norm[start + i] += window[i] * window[i];
    }
  }
  // Near the signal ends only the window tails overlap; dividing by their
  // tiny squared sum would amplify noise by 1/w, so the normaliser is floored
  // relative to its peak.
  const double floor = 1e-3 * *std::max_element(norm.begin(), norm.end());
  for (std::size_t i = 0; i < length; ++i) out[i] /= std::max(norm[i], floor);
  return out;
}

}  // namespace

void MelConfig::Validate() const {
  if (n_mels < 1) throw Error(ErrorKind::kArgument, "n_mels must be >= 1");
  if (hop < 1) throw Error(ErrorKind::kArgument, "hop must be >= 1");
  if (!(hop <= win && win <= fft_size))
    throw Error(ErrorKind::kArgument, "require hop <= win <= fft_size");
  if (!IsPowerOfTwo(fft_size))
    throw Error(ErrorKind::kArgument, "fft_size must be a power of two");
}

double MelSpec::Mean() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto &row : frames) {
    for (double v : row) sum += v;
    count += row.size();
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

double HzToMel(double hz) {
  if (hz < kMelLogBreakHz) return hz / kMelLinearStep;
  return kMelLogBreak + std::log(hz / kMelLogBreakHz) / MelLogStep();
}

double MelToHz(double mel) {
  if (mel < kMelLogBreak) return mel * kMelLinearStep;
  return kMelLogBreakHz * std::exp(MelLogStep() * (mel - kMelLogBreak));
}

std::vector<std::vector<double>> MelFilterbank(int sample_rate, int fft_size,
                                               int n_mels) {
  const int n_bins = fft_size / 2 + 1;
  const double max_mel = HzToMel(sample_rate / 2.0);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i)
    edges[i] = MelToHz(max_mel * i / (n_mels + 1));

  std::vector<std::vector<double>> fb(n_mels, std::vector<double>(n_bins, 0.0));
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    const double enorm = 2.0 / (hi - lo);
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      const double rising = (f - lo) / (mid - lo);
      const double falling = (hi - f) / (hi - mid);
      fb[m][k] = std::max(0.0, std::min(rising, falling)) * enorm;
    }
  }
  return fb;
}

std::vector<double> HannWindow(int length) {
  std::vector<double> w(length);
  for (int i = 0; i < length; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / length);
  return w;
}

void Fft(std::vector<std::complex<double>> &data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw Error(ErrorKind::kArgument, "FFT size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle =
        2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1 : -1);
    const std::complex<double> step(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = data[i + k];
        const auto v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= step;
      }
    }
  }
  if (inverse)
    for (auto &x : data) x /= static_cast<double>(n);
}

MelSpec MelSpectrogram(const Waveform &wave, const MelConfig &cfg) {
  cfg.Validate();
  if (wave.samples.size() < static_cast<std::size_t>(cfg.win))
    throw Error(ErrorKind::kLength,
                "waveform of " + std::to_string(wave.samples.size()) +
                    " samples is shorter than window " + std::to_string(cfg.win));
  const auto window = HannWindow(cfg.win);
  const auto fb = MelFilterbank(wave.sample_rate, cfg.fft_size, cfg.n_mels);
  const auto spectra = Stft(wave.samples, cfg.fft_size, cfg.win, cfg.hop, window);

  MelSpec spec;
  spec.n_mels = cfg.n_mels;
  spec.hop = cfg.hop;
  spec.win = cfg.win;
  spec.fft_size = cfg.fft_size;
  spec.sample_rate = wave.sample_rate;
  spec.frames.reserve(spectra.size());
  std::vector<double> power(cfg.fft_size / 2 + 1);
  for (const auto &frame : spectra) {
    for (std::size_t k = 0; k < frame.size(); ++k) power[k] = std::norm(frame[k]);
    std::vector<double> row(cfg.n_mels);
    for (int m = 0; m < cfg.n_mels; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < power.size(); ++k) e += fb[m][k] * power[k];
      row[m] = std::log(std::max(e, kLogFloor));
    }
    spec.frames.push_back(std::move(row));
  }
  return spec;
}

MelSpec SpecAugment(const MelSpec &spec, const SpecAugmentConfig &cfg,
                    std::uint64_t seed) {
  const auto n_frames = static_cast<int>(spec.num_frames());
  const int n_mels = spec.n_mels;
  if (cfg.n_freq_masks < 0 || cfg.n_time_masks < 0 || cfg.max_freq_width < 0 ||
      cfg.max_time_width < 0)
    throw Error(ErrorKind::kArgument, "SpecAugment counts and widths must be >= 0");
  if (cfg.max_freq_width > n_mels || cfg.max_time_width > n_frames)
    throw Error(ErrorKind::kArgument, "SpecAugment widths exceed spectrogram size");

  const double fill = spec.Mean();
  MelSpec out = spec;
  Rng rng(seed);
  for (int i = 0; i < cfg.n_freq_masks; ++i) {
    const auto width = static_cast<int>(rng.IntInclusive(0, cfg.max_freq_width));
    const auto start = static_cast<int>(rng.IntInclusive(0, n_mels - width));
    for (auto &row : out.frames)
      for (int m = start; m < start + width; ++m) row[m] = fill;
  }
  for (int i = 0; i < cfg.n_time_masks; ++i) {
    const auto width = static_cast<int>(rng.IntInclusive(0, cfg.max_time_width));
    const auto start = static_cast<int>(rng.IntInclusive(0, n_frames - width));
    for (int t = start; t < start + width; ++t)
      std::fill(out.frames[t].begin(), out.frames[t].end(), fill);
  }
  return out;
}

Waveform InvertSpectrogram(const MelSpec &spec, int iterations) {
  MelConfig cfg{spec.n_mels, spec.fft_size, spec.win, spec.hop};
  cfg.Validate();
  if (spec.frames.empty())
    throw Error(ErrorKind::kLength, "spectrogram has no frames");
  if (spec.sample_rate <= 0)
    throw Error(ErrorKind::kArgument, "spectrogram sample rate unset");

  const int n_bins = spec.fft_size / 2 + 1;
  const auto fb = MelFilterbank(spec.sample_rate, spec.fft_size, spec.n_mels);
  Eigen::MatrixXd mel_basis(spec.n_mels, n_bins);
  for (int m = 0; m < spec.n_mels; ++m)
    for (int k = 0; k < n_bins; ++k) mel_basis(m, k) = fb[m][k];
  const Eigen::MatrixXd pinv =
      mel_basis.completeOrthogonalDecomposition().pseudoInverse();

  const std::size_t n_frames = spec.num_frames();
  std::vector<std::vector<double>> magnitude(n_frames);
  Eigen::VectorXd mel(spec.n_mels);
  for (std::size_t t = 0; t < n_frames; ++t) {
    for (int m = 0; m < spec.n_mels; ++m) mel(m) = std::exp(spec.frames[t][m]);
    const Eigen::VectorXd linear = pinv * mel;
    magnitude[t].resize(n_bins);
    for (int k = 0; k < n_bins; ++k)
      magnitude[t][k] = std::sqrt(std::max(linear(k), 0.0));
  }

  const auto window = HannWindow(spec.win);
  std::vector<std::vector<std::complex<double>>> estimate(n_frames);
  for (std::size_t t = 0; t < n_frames; ++t)
    estimate[t].assign(magnitude[t].begin(), magnitude[t].end());

  std::vector<double> signal =
      Istft(estimate, spec.fft_size, spec.win, spec.hop, window);
  for (int it = 0; it < iterations; ++it) {
    const auto rebuilt = Stft(signal, spec.fft_size, spec.win, spec.hop, window);
    for (std::size_t t = 0; t < n_frames; ++t) {
      for (int k = 0; k < n_bins; ++k) {
        const double mag = std::abs(rebuilt[t][k]);
        const auto phase = mag > 0.0 ? rebuilt[t][k] / mag
                                     : std::complex<double>(1.0, 0.0);
        estimate[t][k] = magnitude[t][k] * phase;
      }
    }
    signal = Istft(estimate, spec.fft_size, spec.win, spec.hop, window);
  }

  Waveform out;
  out.sample_rate = spec.sample_rate;
  out.samples = std::move(signal);
  for (double &s : out.samples) s = std::clamp(s, -1.0, 1.0);
  return out;
}

}  // namespace phonaug

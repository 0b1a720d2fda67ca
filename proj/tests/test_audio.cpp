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
#include <functional>
#include <set>
#include <random>

#include "doctest.h"
#include "phonaug/audio.hpp"
#include "phonaug/error.hpp"
#include "test_util.hpp"

using namespace phonaug;
using phonaug::testing::DftPeakHz;
using phonaug::testing::Rms;
using phonaug::testing::Sine;
using phonaug::testing::TempDir;

namespace {

void Put16(std::vector<std::uint8_t> &b, unsigned v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
}
void Put32(std::vector<std::uint8_t> &b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
}

// Hand-assembled canonical RIFF header.
std::vector<std::uint8_t> RawWav(int channels, int bits, int rate,
                                 std::uint32_t frames, int format = 1) {
  std::vector<std::uint8_t> b;
  const std::uint32_t data_bytes = frames * channels * bits / 8;
  for (char c : std::string("RIFF")) b.push_back(c);
  Put32(b, 36 + data_bytes);
  for (char c : std::string("WAVEfmt ")) b.push_back(c);
  Put32(b, 16);
  Put16(b, format);
  Put16(b, channels);
  Put32(b, rate);
  Put32(b, rate * channels * bits / 8);
  Put16(b, channels * bits / 8);
  Put16(b, bits);
  for (char c : std::string("data")) b.push_back(c);
  Put32(b, data_bytes);
  for (std::uint32_t i = 0; i < data_bytes; ++i) b.push_back(static_cast<std::uint8_t>(i * 7));
  return b;
}

ErrorKind KindOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kIo;
}

double SlaneyMel(double hz) {
  const double f_sp = 200.0 / 3.0, min_log_hz = 1000.0;
  const double min_log_mel = min_log_hz / f_sp, logstep = std::log(6.4) / 27.0;
  return hz < min_log_hz ? hz / f_sp : min_log_mel + std::log(hz / min_log_hz) / logstep;
}

double SlaneyHz(double mel) {
  const double f_sp = 200.0 / 3.0, min_log_hz = 1000.0;
  const double min_log_mel = min_log_hz / f_sp, logstep = std::log(6.4) / 27.0;
  return mel < min_log_mel ? mel * f_sp : min_log_hz * std::exp(logstep * (mel - min_log_mel));
}

}  // namespace

TEST_CASE("wav: 16000 frames at 16 kHz") {
  Waveform w = ParseWav(RawWav(1, 16, 16000, 16000));
  CHECK(w.samples.size() == 16000);
  CHECK(w.sample_rate == 16000);
  for (double s : w.samples) CHECK((s >= -1.0 && s < 1.0));
}

TEST_CASE("wav: write/read round trip within one quantisation step") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Waveform w;
  w.sample_rate = 22050;
  for (int i = 0; i < 5000; ++i) w.samples.push_back(dist(gen));
  w.samples.push_back(1.0);
  w.samples.push_back(-1.0);
  TempDir dir;
  WriteWav(dir / "r.wav", w);
  Waveform back = ReadWav(dir / "r.wav");
  REQUIRE(back.samples.size() == w.samples.size());
  CHECK(back.sample_rate == 22050);
  double worst = 0.0;
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    worst = std::max(worst, std::abs(back.samples[i] - w.samples[i]));
  CHECK(worst <= 1.0 / 32768.0);
}

TEST_CASE("wav: unsupported layouts are format errors") {
  CHECK(KindOf([] { ParseWav(RawWav(2, 16, 16000, 100)); }) == ErrorKind::kFormat);
  CHECK(KindOf([] { ParseWav(RawWav(1, 8, 16000, 100)); }) == ErrorKind::kFormat);
  CHECK(KindOf([] { ParseWav(RawWav(1, 16, 16000, 100, 3)); }) == ErrorKind::kFormat);
  auto truncated = RawWav(1, 16, 16000, 100);
  truncated.resize(truncated.size() - 10);
  CHECK(KindOf([&] { ParseWav(truncated); }) == ErrorKind::kFormat);
  CHECK(KindOf([] { ParseWav({'R', 'I', 'F', 'F'}); }) == ErrorKind::kFormat);
}

TEST_CASE("change_speed") {
  Waveform w = Sine(440.0, 16000);
  CHECK(ChangeSpeed(w, 1.6).samples.size() == 10000);
  CHECK(ChangeSpeed(w, 1.0) == w);
  CHECK(KindOf([&] { ChangeSpeed(w, 0.0); }) == ErrorKind::kArgument);
  CHECK(KindOf([&] { ChangeSpeed(w, -1.0); }) == ErrorKind::kArgument);

  SUBCASE("440 Hz moves to 704 Hz") {
    Waveform fast = ChangeSpeed(w, 1.6);
    const double bin = 16000.0 / fast.samples.size();
    CHECK(std::abs(DftPeakHz(fast) - 704.0) <= bin);
  }
  SUBCASE("length law over the explored factor range") {
    for (double f = 1.2; f <= 2.5 + 1e-9; f += 0.05) {
      for (std::size_t n : {1u, 7u, 999u, 16000u}) {
        Waveform x = Sine(300.0, n);
        CHECK(ChangeSpeed(x, f).samples.size() ==
              static_cast<std::size_t>(std::llround(static_cast<double>(n) / f)));
      }
    }
  }
}

TEST_CASE("apply_gain_db") {
  Waveform w;
  w.samples = {0.5, -0.5, 0.8, -0.8, 0.0};
  CHECK(ApplyGainDb(w, 0.0) == w);
  Waveform g = ApplyGainDb(w, 5.0);
  CHECK(g.samples[0] == doctest::Approx(0.889140).epsilon(1e-6));
  CHECK(g.samples[1] == doctest::Approx(-0.889140).epsilon(1e-6));
  CHECK(g.samples[2] == 1.0);
  CHECK(g.samples[3] == -1.0);
  CHECK(g.samples[4] == 0.0);

  for (double db : {-12.0, -3.0, 1.0, 5.0}) {
    Waveform s = Sine(440.0, 8000, 16000, 0.3);
    const double ratio = Rms(ApplyGainDb(s, db).samples) / Rms(s.samples);
    CHECK(std::abs(ratio / std::pow(10.0, db / 20.0) - 1.0) < 1e-6);
  }
}

TEST_CASE("voice_augment") {
  Waveform w = Sine(330.0, 4000);
  const Waveform speed = ChangeSpeed(w, 1.6);
  const Waveform gain = ApplyGainDb(w, 5.0);
  const Waveform both = ApplyGainDb(ChangeSpeed(w, 1.6), 5.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Waveform out = VoiceAugment(w, seed);
    CHECK((out == speed || out == gain || out == both));
    CHECK(out == VoiceAugment(w, seed));
  }
  int counts[3] = {0, 0, 0};
  for (std::uint64_t seed = 0; seed < 3000; ++seed)
    counts[static_cast<int>(ChooseVoiceVariant(seed))]++;
  for (int c : counts) {
    CHECK(c >= 900);
    CHECK(c <= 1100);
  }
}

TEST_CASE("mel_spectrogram") {
  SUBCASE("silence sits on the floor") {
    Waveform w;
    w.samples.assign(4000, 0.0);
    MelSpec s = MelSpectrogram(w);
    for (const auto &row : s.frames)
      for (double v : row) CHECK(v == std::log(kLogFloor));
  }
  SUBCASE("frame count") {
    Waveform w = Sine(440.0, 400);
    CHECK(MelSpectrogram(w).num_frames() == 1);
    for (std::size_t n : {400u, 401u, 559u, 560u, 16000u}) {
      Waveform x = Sine(440.0, n);
      MelSpec s = MelSpectrogram(x);
      CHECK(s.num_frames() == 1 + (n - 400) / 160);
      for (const auto &row : s.frames) CHECK(row.size() == 80);
    }
    Waveform short_w = Sine(440.0, 399);
    CHECK(KindOf([&] { MelSpectrogram(short_w); }) == ErrorKind::kLength);
  }
  SUBCASE("a 440 Hz tone peaks in the band centred nearest 440 Hz") {
    const int n_mels = 80;
    const double top = SlaneyMel(8000.0);
    int nearest = 0;
    double best = 1e300;
    for (int m = 0; m < n_mels; ++m) {
      const double centre = SlaneyHz(top * (m + 1) / (n_mels + 1));
      if (std::abs(centre - 440.0) < best) {
        best = std::abs(centre - 440.0);
        nearest = m;
      }
    }
    MelSpec s = MelSpectrogram(Sine(440.0, 16000));
    const auto &row = s.frames[s.num_frames() / 2];
    const int argmax = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    CHECK(argmax == nearest);
  }
  SUBCASE("configuration is validated") {
    MelConfig c;
    c.hop = 500;
    CHECK_THROWS_AS(c.Validate(), Error);
    c = MelConfig{};
    c.fft_size = 500;
    CHECK_THROWS_AS(c.Validate(), Error);
  }
}

TEST_CASE("fft agrees with a direct DFT") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> dist;
  std::vector<std::complex<double>> x(64);
  for (auto &v : x) v = {dist(gen), dist(gen)};
  auto y = x;
  Fft(y);
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::complex<double> acc;
    for (std::size_t n = 0; n < x.size(); ++n)
      acc += x[n] * std::polar(1.0, -2.0 * std::numbers::pi * k * n / 64.0);
    CHECK(std::abs(acc - y[k]) < 1e-9);
  }
  Fft(y, true);
  for (std::size_t n = 0; n < x.size(); ++n) CHECK(std::abs(y[n] - x[n]) < 1e-12);
}

TEST_CASE("spec_augment") {
  MelSpec base;
  base.n_mels = 80;
  base.hop = 160;
  base.win = 400;
  base.fft_size = 512;
  base.sample_rate = 16000;
  std::mt19937_64 gen(5);
  std::normal_distribution<double> dist(-4.0, 2.0);
  base.frames.assign(100, std::vector<double>(80));
  for (auto &row : base.frames)
    for (double &v : row) v = dist(gen);

  SUBCASE("zero widths is the identity") {
    SpecAugmentConfig cfg{3, 3, 0, 0};
    CHECK(SpecAugment(base, cfg, 17) == base);
  }
  SUBCASE("one frequency mask changes at most w x T cells") {
    SpecAugmentConfig cfg{1, 0, 8, 0};
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      MelSpec out = SpecAugment(base, cfg, seed);
      std::size_t changed = 0;
      std::set<int> bands;
      for (std::size_t t = 0; t < 100; ++t)
        for (int m = 0; m < 80; ++m)
          if (out.frames[t][m] != base.frames[t][m]) {
            ++changed;
            bands.insert(m);
          }
      CHECK(bands.size() <= 8);
      CHECK(changed <= bands.size() * 100);
    }
  }
  SUBCASE("masked cells match a re-derivation of the seeded draws") {
    SpecAugmentConfig cfg{1, 1, 8, 10};
    for (std::uint64_t seed : {7u, 8u, 9u, 1234u}) {
      // Independent replay: mt19937_64, 53-bit uniforms, floor(u * n).
      std::mt19937_64 eng(seed);
      auto draw = [&](int lo, int hi) {
        const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
        return lo + static_cast<int>(std::floor(u * (hi - lo + 1)));
      };
      const int fw = draw(0, 8), fs = draw(0, 80 - fw);
      const int tw = draw(0, 10), ts = draw(0, 100 - tw);
      double mean = 0.0;
      for (auto &row : base.frames)
        for (double v : row) mean += v;
      mean /= 8000.0;
      MelSpec out = SpecAugment(base, cfg, seed);
      for (int t = 0; t < 100; ++t)
        for (int m = 0; m < 80; ++m) {
          const bool masked = (m >= fs && m < fs + fw) || (t >= ts && t < ts + tw);
          if (masked)
            CHECK(out.frames[t][m] == doctest::Approx(mean).epsilon(1e-12));
          else
            CHECK(out.frames[t][m] == base.frames[t][m]);
        }
      CHECK(out == SpecAugment(base, cfg, seed));
    }
  }
  SUBCASE("oversized widths are rejected") {
    SpecAugmentConfig cfg{1, 1, 81, 0};
    CHECK(KindOf([&] { SpecAugment(base, cfg, 0); }) == ErrorKind::kArgument);
  }
}

TEST_CASE("invert_spectrogram") {
  SUBCASE("output length follows overlap-add geometry") {
    Waveform w = Sine(440.0, 3000);
    MelSpec s = MelSpectrogram(w);
    Waveform back = InvertSpectrogram(s, 4);
    CHECK(back.samples.size() == (s.num_frames() - 1) * 160 + 400);
    for (double v : back.samples) CHECK((v >= -1.0 && v <= 1.0));
  }
  SUBCASE("440 Hz survives the round trip") {
    MelSpec s = MelSpectrogram(Sine(440.0, 16000));
    Waveform back = InvertSpectrogram(s, 32);
    const double bin = 16000.0 / back.samples.size();
    CHECK(std::abs(DftPeakHz(back) - 440.0) <= bin);
  }
  SUBCASE("silence stays silent") {
    Waveform w;
    w.samples.assign(8000, 0.0);
    Waveform back = InvertSpectrogram(MelSpectrogram(w), 32);
    CHECK(Rms(back.samples) < 1e-3);
  }
}

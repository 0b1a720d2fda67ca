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
#include <cstring>
#include <fstream>
#include <iterator>

#include "phonaug/audio.hpp"
#include "phonaug/error.hpp"
#include "phonaug/rng.hpp"

namespace phonaug {

namespace {

std::uint32_t ReadU32(const std::uint8_t *p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadU16(const std::uint8_t *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<std::uint8_t> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU16(std::vector<std::uint8_t> &out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutTag(std::vector<std::uint8_t> &out, const char *tag) {
  out.insert(out.end(), tag, tag + 4);
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

Waveform ParseWav(const std::vector<std::uint8_t> &bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error(ErrorKind::kFormat, "not a RIFF/WAVE file");

  bool have_fmt = false;
  int sample_rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t *hdr = bytes.data() + pos;
    std::uint32_t size = ReadU32(hdr + 4);
    std::size_t body = pos + 8;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size())
        throw Error(ErrorKind::kFormat, "truncated fmt chunk");
      std::uint16_t format = ReadU16(bytes.data() + body);
      std::uint16_t channels = ReadU16(bytes.data() + body + 2);
      sample_rate = static_cast<int>(ReadU32(bytes.data() + body + 4));
      std::uint16_t bits = ReadU16(bytes.data() + body + 14);
      if (format == kFormatExtensible && size >= 26)
        format = ReadU16(bytes.data() + body + 24);
      if (format != kFormatPcm)
        throw Error(ErrorKind::kFormat, "unsupported format tag " +
                                            std::to_string(format) +
                                            " (PCM required)");
      if (channels != 1)
        throw Error(ErrorKind::kFormat,
                    std::to_string(channels) + " channels (mono required)");
      if (bits != 16)
        throw Error(ErrorKind::kFormat,
                    std::to_string(bits) + "-bit samples (16-bit required)");
      if (sample_rate <= 0)
        throw Error(ErrorKind::kFormat, "non-positive sample rate");
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      if (!have_fmt) throw Error(ErrorKind::kFormat, "data chunk before fmt");
      if (body + size > bytes.size() || size % 2 != 0)
        throw Error(ErrorKind::kFormat, "truncated data chunk");
      Waveform w;
      w.sample_rate = sample_rate;
      w.samples.resize(size / 2);
      for (std::size_t i = 0; i < w.samples.size(); ++i) {
        auto raw = static_cast<std::int16_t>(ReadU16(bytes.data() + body + 2 * i));
        w.samples[i] = static_cast<double>(raw) / 32768.0;
      }
      return w;
    }
    pos = body + size + (size & 1);
  }
  throw Error(ErrorKind::kFormat, have_fmt ? "missing data chunk"
                                           : "missing fmt chunk");
}

Waveform ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return ParseWav(bytes);
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

std::vector<std::uint8_t> SerializeWav(const Waveform &wave) {
  if (wave.sample_rate <= 0)
    throw Error(ErrorKind::kArgument, "sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(wave.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(wave.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(wave.sample_rate) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (double s : wave.samples) {
    double q = std::round(s * 32768.0);
    q = std::clamp(q, -32768.0, 32767.0);
    PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return out;
}

void WriteWav(const std::string &path, const Waveform &wave) {
  std::vector<std::uint8_t> bytes = SerializeWav(wave);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

Waveform ChangeSpeed(const Waveform &wave, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw Error(ErrorKind::kArgument, "speed factor must be positive");
  const std::size_t n = wave.samples.size();
  Waveform out;
  out.sample_rate = wave.sample_rate;
  if (n == 0) return out;
  const auto out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) / factor));
  out.samples.resize(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    double pos = static_cast<double>(i) * factor;
    auto j = static_cast<std::size_t>(pos);
    if (j >= n - 1) {
      out.samples[i] = wave.samples[n - 1];
      continue;
    }
    double frac = pos - static_cast<double>(j);
    out.samples[i] = frac == 0.0 ? wave.samples[j]
                                 : wave.samples[j] * (1.0 - frac) +
                                       wave.samples[j + 1] * frac;
  }
  return out;
}

Waveform ApplyGainDb(const Waveform &wave, double db) {
  const double scale = std::pow(10.0, db / 20.0);
  Waveform out = wave;
  for (double &s : out.samples) s = std::clamp(s * scale, -1.0, 1.0);
  return out;
}

VoiceVariant ChooseVoiceVariant(std::uint64_t seed) {
  Rng rng(seed);
  return static_cast<VoiceVariant>(rng.Index(3));
}

Waveform ApplyVoiceVariant(const Waveform &wave, VoiceVariant variant) {
  switch (variant) {
    case VoiceVariant::kSpeed:
      return ChangeSpeed(wave, kVoiceSpeedFactor);
    case VoiceVariant::kGain:
      return ApplyGainDb(wave, kVoiceGainDb);
    case VoiceVariant::kSpeedThenGain:
      return ApplyGainDb(ChangeSpeed(wave, kVoiceSpeedFactor), kVoiceGainDb);
  }
  return wave;
}

Waveform VoiceAugment(const Waveform &wave, std::uint64_t seed) {
  return ApplyVoiceVariant(wave, ChooseVoiceVariant(seed));
}

}  // namespace phonaug

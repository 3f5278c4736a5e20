/*
 * Copyright 2026 The mmshap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mmshap/audio.h"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mmshap/error.h"

namespace mmshap {
namespace {

static_assert(std::endian::native == std::endian::little,
              "wire and WAV codecs assume a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void PutU32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
  }
}

void PutTag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

[[noreturn]] void BadWav(const std::string& why) {
  throw Error(ErrorCode::kIoError, "invalid WAV: " + why);
}

}  // namespace

AudioClip Resample(const AudioClip& clip, int target_rate_hz) {
  if (target_rate_hz <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "target rate must be positive");
  }
  if (clip.sample_rate_hz <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "source rate must be positive");
  }
  if (target_rate_hz == clip.sample_rate_hz || clip.samples.empty()) {
    AudioClip copy = clip;
    copy.sample_rate_hz = target_rate_hz;
    return copy;
  }
  const double ratio =
      static_cast<double>(clip.sample_rate_hz) / target_rate_hz;
  const std::size_t in_len = clip.samples.size();
  const auto out_len = static_cast<std::size_t>(std::max<long long>(
      1, std::llround(static_cast<double>(in_len) / ratio)));

  AudioClip out;
  out.sample_rate_hz = target_rate_hz;
  out.samples.resize(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const double x = static_cast<double>(i) * ratio;
    const auto i0 = static_cast<std::size_t>(x);
    if (i0 + 1 >= in_len) {
      out.samples[i] = clip.samples[in_len - 1];
      continue;
    }
    const double frac = x - static_cast<double>(i0);
    out.samples[i] = static_cast<float>(
        clip.samples[i0] + frac * (clip.samples[i0 + 1] - clip.samples[i0]));
  }
  return out;
}

AudioClip TruncateClip(const AudioClip& clip, double max_seconds) {
  if (!(max_seconds > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "max_seconds must be positive");
  }
  const double limit = std::floor(max_seconds * clip.sample_rate_hz + 1e-9);
  const auto keep = static_cast<std::size_t>(std::max(1.0, limit));
  if (keep >= clip.samples.size()) return clip;
  AudioClip out;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.samples.assign(clip.samples.begin(),
                     clip.samples.begin() + static_cast<std::ptrdiff_t>(keep));
  return out;
}

AudioClip DecodeWav(std::span<const unsigned char> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    BadWav("missing RIFF/WAVE header");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > avail) BadWav("truncated fmt chunk");
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      if (format == kFormatExtensible) {
        if (size < 40) BadWav("truncated extensible fmt chunk");
        format = ReadU16(chunk + 8 + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      // Some writers leave the size field at 0 or 0xFFFFFFFF when streaming.
      data_size = std::min<std::size_t>(size, avail);
      if (size == 0) data_size = avail;
    }
    pos = body + size + (size & 1);
  }
  if (channels == 0 || rate == 0) BadWav("missing fmt chunk");
  if (data == nullptr) BadWav("missing data chunk");

  std::size_t bytes_per_sample = 0;
  if (format == kFormatPcm && bits == 16) {
    bytes_per_sample = 2;
  } else if (format == kFormatFloat && bits == 32) {
    bytes_per_sample = 4;
  } else {
    BadWav("unsupported encoding (format " + std::to_string(format) + ", " +
           std::to_string(bits) + " bits)");
  }
  const std::size_t frame = bytes_per_sample * channels;
  const std::size_t frames = data_size / frame;

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(rate);
  clip.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + f * frame + c * bytes_per_sample;
      if (bytes_per_sample == 2) {
        acc += static_cast<std::int16_t>(ReadU16(p)) / 32768.0;
      } else {
        acc += std::bit_cast<float>(ReadU32(p));
      }
    }
    clip.samples[f] = static_cast<float>(acc / channels);
  }
  return clip;
}

AudioClip ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  try {
    return DecodeWav(bytes);
  } catch (const Error& e) {
    throw Error(ErrorCode::kIoError, path.string() + ": " + e.what());
  }
}

void WriteWav(const std::filesystem::path& path, const AudioClip& clip,
              WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(clip.samples.size() * (bits / 8));

  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, pcm ? kFormatPcm : kFormatFloat);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(clip.sample_rate_hz));
  PutU32(out, static_cast<std::uint32_t>(clip.sample_rate_hz) * (bits / 8));
  PutU16(out, bits / 8);
  PutU16(out, bits);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (float s : clip.samples) {
    if (pcm) {
      const double clamped = std::clamp(static_cast<double>(s), -1.0, 1.0);
      const auto v = static_cast<std::int16_t>(
          std::clamp(std::lround(clamped * 32768.0), -32768L, 32767L));
      PutU16(out, static_cast<std::uint16_t>(v));
    } else {
      PutU32(out, std::bit_cast<std::uint32_t>(s));
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) {
    throw Error(ErrorCode::kIoError, "short write to " + path.string());
  }
}

std::string EncodeF32Base64(std::span<const float> samples) {
  const auto* raw = reinterpret_cast<const unsigned char*>(samples.data());
  const std::size_t len = samples.size_bytes();
  std::string out(4 * ((len + 2) / 3), '\0');
  const int written = EVP_EncodeBlock(
      reinterpret_cast<unsigned char*>(out.data()), raw, static_cast<int>(len));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::vector<float> DecodeF32Base64(std::string_view encoded) {
  if (encoded.size() % 4 != 0) {
    throw Error(ErrorCode::kProtocolViolation,
                "audio payload is not padded base64");
  }
  std::vector<unsigned char> raw(encoded.size() / 4 * 3);
  const int n = EVP_DecodeBlock(
      raw.data(), reinterpret_cast<const unsigned char*>(encoded.data()),
      static_cast<int>(encoded.size()));
  if (n < 0) {
    throw Error(ErrorCode::kProtocolViolation, "audio payload is not base64");
  }
  // EVP_DecodeBlock counts padding as zero bytes.
  std::size_t len = static_cast<std::size_t>(n);
  if (!encoded.empty() && encoded.back() == '=') --len;
  if (encoded.size() >= 2 && encoded[encoded.size() - 2] == '=') --len;
  if (len % sizeof(float) != 0) {
    throw Error(ErrorCode::kProtocolViolation,
                "audio payload is not a whole number of float32 samples");
  }
  std::vector<float> samples(len / sizeof(float));
  std::memcpy(samples.data(), raw.data(), len);
  return samples;
}

}  // namespace mmshap

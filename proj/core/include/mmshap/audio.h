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

#ifndef MMSHAP_AUDIO_H_
#define MMSHAP_AUDIO_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmshap/types.h"

namespace mmshap {

// Linear-interpolation resampling. Output length is
// max(1, round(size * target / source)); identical rates return a copy.
AudioClip Resample(const AudioClip& clip, int target_rate_hz);

// Keeps the first floor(max_seconds * rate) samples (at least one).
AudioClip TruncateClip(const AudioClip& clip, double max_seconds);

enum class WavEncoding { kPcm16, kFloat32 };

// Reads RIFF/WAVE with 16-bit PCM or 32-bit IEEE float samples. Multichannel
// input is downmixed by averaging. Throws kIoError.
AudioClip ReadWav(const std::filesystem::path& path);
AudioClip DecodeWav(std::span<const unsigned char> bytes);

void WriteWav(const std::filesystem::path& path, const AudioClip& clip,
              WavEncoding encoding = WavEncoding::kFloat32);

// Little-endian float32 PCM, base64 encoded; the wire format for audio.
std::string EncodeF32Base64(std::span<const float> samples);
// Throws kProtocolViolation on malformed input.
std::vector<float> DecodeF32Base64(std::string_view encoded);

}  // namespace mmshap

#endif  // MMSHAP_AUDIO_H_

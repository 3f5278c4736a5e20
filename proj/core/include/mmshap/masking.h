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

#ifndef MMSHAP_MASKING_H_
#define MMSHAP_MASKING_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mmshap/types.h"

namespace mmshap {

// Only kZeros is implemented. The other values are reserved so persisted
// configs can name them; requesting one throws kInvalidArgument.
enum class AudioMaskKind { kZeros, kWhiteNoise, kNeighborAverage };

// Audio indicators and question/answer indicators.
std::vector<std::string> DefaultProtectedSurfaces();

struct MaskPolicy {
  AudioMaskKind audio_mask = AudioMaskKind::kZeros;
  std::int64_t mask_token_id = 0;
  std::vector<std::string> protected_surfaces = DefaultProtectedSurfaces();
};

// Splits [0, clip_len) into min(n_text, clip_len) contiguous windows of
// floor(clip_len / count) samples; the last window absorbs the remainder.
std::vector<Span> PlanAudioWindows(std::size_t clip_len, std::size_t n_text);

// Question-span positions whose surface is not protected, in prompt order.
// Throws kEmptyMaskableSet if nothing qualifies.
std::vector<std::size_t> SelectMaskableTokens(const TokenizedPrompt& prompt,
                                              const MaskPolicy& policy);

FeaturePartition BuildPartition(const AudioClip& clip,
                                const TokenizedPrompt& prompt,
                                const MaskPolicy& policy);

struct MaskedInput {
  std::vector<float> samples;
  std::vector<std::int64_t> token_ids;
};

// Materializes the model input for `coalition`: absent audio windows are
// zeroed, absent text features become policy.mask_token_id, everything else
// is copied verbatim.
MaskedInput ApplyCoalition(const AudioClip& clip, const TokenizedPrompt& prompt,
                           const FeaturePartition& partition,
                           const Coalition& coalition,
                           const MaskPolicy& policy);

}  // namespace mmshap

#endif  // MMSHAP_MASKING_H_

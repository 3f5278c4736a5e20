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

#include "mmshap/masking.h"

#include <algorithm>
#include <string>

#include "mmshap/error.h"

namespace mmshap {

std::vector<std::string> DefaultProtectedSurfaces() {
  return {"<audio>", "<audio_padding>", "#Audio", "<|question|>",
          "<|answer|>"};
}

std::vector<Span> PlanAudioWindows(std::size_t clip_len, std::size_t n_text) {
  if (clip_len == 0 || n_text == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "window planning needs a nonempty clip and text features");
  }
  const std::size_t count = std::min(n_text, clip_len);
  const std::size_t width = clip_len / count;
  std::vector<Span> windows;
  windows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t begin = i * width;
    const std::size_t end = (i + 1 == count) ? clip_len : begin + width;
    windows.push_back({begin, end});
  }
  return windows;
}

std::vector<std::size_t> SelectMaskableTokens(const TokenizedPrompt& prompt,
                                              const MaskPolicy& policy) {
  std::vector<std::size_t> positions;
  const Span q = prompt.question_span;
  for (std::size_t i = q.begin; i < q.end && i < prompt.tokens.size(); ++i) {
    if (prompt.instruction_span.contains(i)) continue;
    const Token& tok = prompt.tokens[i];
    if (tok.role == TokenRole::kInstruction) continue;
    const auto& prot = policy.protected_surfaces;
    if (std::find(prot.begin(), prot.end(), tok.text) != prot.end()) continue;
    positions.push_back(i);
  }
  if (positions.empty()) {
    throw Error(ErrorCode::kEmptyMaskableSet,
                "prompt has no maskable question tokens");
  }
  return positions;
}

FeaturePartition BuildPartition(const AudioClip& clip,
                                const TokenizedPrompt& prompt,
                                const MaskPolicy& policy) {
  ValidateClip(clip);
  FeaturePartition partition;
  partition.text_positions = SelectMaskableTokens(prompt, policy);
  partition.n_text = partition.text_positions.size();
  partition.audio_windows = PlanAudioWindows(clip.size(), partition.n_text);
  partition.n_audio = partition.audio_windows.size();
  return partition;
}

MaskedInput ApplyCoalition(const AudioClip& clip, const TokenizedPrompt& prompt,
                           const FeaturePartition& partition,
                           const Coalition& coalition,
                           const MaskPolicy& policy) {
  if (policy.audio_mask != AudioMaskKind::kZeros) {
    throw Error(ErrorCode::kInvalidArgument,
                "only zero audio masking is implemented");
  }
  const std::size_t n = partition.size();
  for (std::size_t j = n; j < coalition.universe(); ++j) {
    if (coalition.contains(j)) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "coalition references feature " + std::to_string(j) +
                      " but the partition has " + std::to_string(n));
    }
  }

  MaskedInput out{clip.samples, prompt.ids()};
  for (std::size_t j = 0; j < partition.n_audio; ++j) {
    if (coalition.contains(j)) continue;
    const Span w = partition.audio_windows[j];
    std::fill(out.samples.begin() + static_cast<std::ptrdiff_t>(w.begin),
              out.samples.begin() + static_cast<std::ptrdiff_t>(w.end), 0.0f);
  }
  for (std::size_t k = 0; k < partition.n_text; ++k) {
    if (coalition.contains(partition.n_audio + k)) continue;
    out.token_ids[partition.text_positions[k]] = policy.mask_token_id;
  }
  return out;
}

}  // namespace mmshap

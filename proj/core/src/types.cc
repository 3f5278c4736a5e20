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

#include "mmshap/types.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmshap/error.h"

namespace mmshap {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyMaskableSet: return "EmptyMaskableSet";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kExactTooLarge: return "ExactTooLarge";
    case ErrorCode::kModelUnavailable: return "ModelUnavailable";
    case ErrorCode::kConnectFailed: return "ConnectFailed";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kProtocolViolation: return "ProtocolViolation";
    case ErrorCode::kModelError: return "ModelError";
    case ErrorCode::kEmptyGeneration: return "EmptyGeneration";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kMissingExample: return "MissingExample";
    case ErrorCode::kMissingAttribution: return "MissingAttribution";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

bool ParseErrorCode(std::string_view name, ErrorCode* out) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kIoError); ++i) {
    const auto code = static_cast<ErrorCode>(i);
    if (ErrorCodeName(code) == name) {
      *out = code;
      return true;
    }
  }
  return false;
}

void ValidateClip(const AudioClip& clip) {
  if (clip.samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "audio clip has no samples");
  }
  if (clip.sample_rate_hz <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  for (float s : clip.samples) {
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::kInvalidArgument, "audio clip has non-finite samples");
    }
  }
}

std::vector<std::int64_t> TokenizedPrompt::ids() const {
  std::vector<std::int64_t> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.id);
  return out;
}

TokenizedPrompt MakeTokenizedPrompt(
    std::vector<Token> tokens, Span question_span, Span instruction_span,
    std::span<const std::string> protected_surfaces) {
  const std::size_t n = tokens.size();
  if (question_span.end > n || instruction_span.end > n ||
      question_span.begin > question_span.end ||
      instruction_span.begin > instruction_span.end) {
    throw Error(ErrorCode::kInvalidArgument, "prompt span outside token list");
  }
  if (!question_span.empty() && !instruction_span.empty() &&
      question_span.begin < instruction_span.end &&
      instruction_span.begin < question_span.end) {
    throw Error(ErrorCode::kInvalidArgument,
                "question and instruction spans overlap");
  }
  for (std::size_t i = 0; i < n; ++i) {
    Token& tok = tokens[i];
    if (instruction_span.contains(i)) {
      tok.role = TokenRole::kInstruction;
    } else if (question_span.contains(i) &&
               std::find(protected_surfaces.begin(), protected_surfaces.end(),
                         tok.text) == protected_surfaces.end()) {
      tok.role = TokenRole::kMaskable;
    } else {
      tok.role = TokenRole::kProtected;
    }
  }
  return TokenizedPrompt{std::move(tokens), question_span, instruction_span};
}

std::optional<std::size_t> FeaturePartition::FeatureForPosition(
    std::size_t position) const {
  auto it = std::lower_bound(text_positions.begin(), text_positions.end(),
                             position);
  if (it == text_positions.end() || *it != position) return std::nullopt;
  return n_audio + static_cast<std::size_t>(it - text_positions.begin());
}

std::optional<std::size_t> FeaturePartition::FeatureForSample(
    std::size_t sample) const {
  auto it = std::upper_bound(
      audio_windows.begin(), audio_windows.end(), sample,
      [](std::size_t s, const Span& w) { return s < w.end; });
  if (it == audio_windows.end() || !it->contains(sample)) return std::nullopt;
  return static_cast<std::size_t>(it - audio_windows.begin());
}

Coalition Coalition::Full(std::size_t universe) {
  Coalition c(universe);
  c.present_.assign(universe, true);
  return c;
}

Coalition Coalition::FromIndices(std::size_t universe,
                                 std::span<const std::size_t> indices) {
  Coalition c(universe);
  for (std::size_t j : indices) c.insert(j);
  return c;
}

void Coalition::insert(std::size_t j) {
  if (j >= present_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "feature " + std::to_string(j) + " outside coalition universe " +
                    std::to_string(present_.size()));
  }
  present_[j] = true;
}

void Coalition::erase(std::size_t j) {
  if (j < present_.size()) present_[j] = false;
}

std::size_t Coalition::count() const {
  return static_cast<std::size_t>(
      std::count(present_.begin(), present_.end(), true));
}

std::vector<std::size_t> Coalition::members() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < present_.size(); ++j) {
    if (present_[j]) out.push_back(j);
  }
  return out;
}

void ValidateTrace(const AnswerTrace& trace) {
  if (trace.token_ids.empty()) {
    throw Error(ErrorCode::kProtocolViolation, "answer trace is empty");
  }
  if (trace.token_ids.size() != trace.positions.size() ||
      trace.token_ids.size() != trace.baseline_logits.size()) {
    throw Error(ErrorCode::kProtocolViolation,
                "answer ids, positions and logits differ in length");
  }
  for (double v : trace.baseline_logits) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kProtocolViolation, "non-finite baseline logit");
    }
  }
}

void ValidateAttribution(const AttributionMatrix& attribution) {
  const ShapleyValues& s = attribution.shapley;
  if (s.feature_count != attribution.partition.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "attribution rows do not match partition size");
  }
  if (s.values.size() != s.feature_count * s.token_count) {
    throw Error(ErrorCode::kInvalidArgument, "attribution matrix is ragged");
  }
  for (double v : s.values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite attribution value");
    }
  }
}

}  // namespace mmshap

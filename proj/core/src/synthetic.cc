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

#include "mmshap/synthetic.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmshap/error.h"
#include "mmshap/masking.h"

namespace mmshap {
namespace {

constexpr std::int64_t kFirstMarkerId = 2;
constexpr std::int64_t kFirstWordId = 100;

std::vector<std::string> SplitWords(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

bool IsMarkerId(std::int64_t id) {
  return id >= kFirstMarkerId &&
         id < kFirstMarkerId + static_cast<std::int64_t>(SyntheticMarkers().size());
}

}  // namespace

const std::vector<std::string>& SyntheticMarkers() {
  static const std::vector<std::string> kMarkers = {
      "<|system|>", "<|user|>",     "<audio>",   "<audio_padding>",
      "#Audio",     "<|question|>", "<|answer|>"};
  return kMarkers;
}

std::int64_t SyntheticTokenId(std::string_view surface) {
  if (surface == "[MASK]") return synthetic_vocab::kMask;
  if (surface == "</s>") return synthetic_vocab::kEos;
  const auto& markers = SyntheticMarkers();
  for (std::size_t i = 0; i < markers.size(); ++i) {
    if (markers[i] == surface) return kFirstMarkerId + static_cast<std::int64_t>(i);
  }
  // FNV-1a
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : surface) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return kFirstWordId +
         static_cast<std::int64_t>(h % ((std::uint64_t{1} << 31) - kFirstWordId));
}

TokenizedPrompt SyntheticTokenize(
    const std::string& text, const std::vector<std::string>& protected_surfaces) {
  std::vector<Token> tokens;
  std::size_t user = std::string::npos;
  for (auto& w : SplitWords(text)) {
    const std::int64_t id = SyntheticTokenId(w);
    if (id == synthetic_vocab::kUser && user == std::string::npos) {
      user = tokens.size();
    }
    tokens.push_back({id, std::move(w), TokenRole::kProtected});
  }
  const std::size_t n = tokens.size();
  Span instruction{0, 0};
  Span question{0, n};
  if (user != std::string::npos) {
    instruction = {0, user};
    question = {user + 1, n};
  }
  return MakeTokenizedPrompt(std::move(tokens), question, instruction,
                             protected_surfaces);
}

std::string_view SyntheticKindName(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kAdditive: return "additive";
    case SyntheticKind::kDummyAudio: return "dummy_audio";
    case SyntheticKind::kDummyText: return "dummy_text";
    case SyntheticKind::kInteraction: return "interaction";
    case SyntheticKind::kConstant: return "constant";
  }
  return "unknown";
}

std::optional<SyntheticKind> ParseSyntheticKind(std::string_view name) {
  for (SyntheticKind k :
       {SyntheticKind::kAdditive, SyntheticKind::kDummyAudio,
        SyntheticKind::kDummyText, SyntheticKind::kInteraction,
        SyntheticKind::kConstant}) {
    if (SyntheticKindName(k) == name) return k;
  }
  return std::nullopt;
}

SyntheticModelSpec SyntheticPreset(std::string_view name) {
  SyntheticModelSpec spec;
  if (name == "balanced") {
    spec.kind = SyntheticKind::kAdditive;
    spec.model_id = "synthetic-balanced";
    return spec;
  }
  const auto kind = ParseSyntheticKind(name);
  if (!kind) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown synthetic model '" + std::string(name) + "'");
  }
  spec.kind = *kind;
  switch (*kind) {
    case SyntheticKind::kAdditive:
      spec.audio_default_weight = 0.5;
      spec.text_default_weight = 1.5;
      break;
    case SyntheticKind::kInteraction:
      spec.audio_default_weight = 0.2;
      spec.text_default_weight = 0.2;
      for (std::size_t k = 0; k < 4; ++k) {
        spec.interaction_pairs.push_back({{true, k}, {false, k}});
      }
      break;
    case SyntheticKind::kConstant:
      spec.base = 3.0;
      break;
    default:
      break;
  }
  return spec;
}

DecodedFeatures DecodeSyntheticFeatures(std::span<const float> audio,
                                        std::span<const std::int64_t> token_ids) {
  std::size_t start = 0;
  for (std::size_t i = 0; i < token_ids.size(); ++i) {
    if (token_ids[i] == synthetic_vocab::kUser) {
      start = i + 1;
      break;
    }
  }
  DecodedFeatures out;
  for (std::size_t i = start; i < token_ids.size(); ++i) {
    if (IsMarkerId(token_ids[i])) continue;
    out.text_present.push_back(token_ids[i] != synthetic_vocab::kMask);
  }
  if (audio.empty() || out.text_present.empty()) return out;
  for (const Span& w : PlanAudioWindows(audio.size(), out.text_present.size())) {
    const bool present =
        std::any_of(audio.begin() + static_cast<std::ptrdiff_t>(w.begin),
                    audio.begin() + static_cast<std::ptrdiff_t>(w.end),
                    [](float s) { return s != 0.0f; });
    out.audio_present.push_back(present);
  }
  return out;
}

SyntheticEndpoint::SyntheticEndpoint(SyntheticModelSpec spec)
    : spec_(std::move(spec)) {
  for (double w : spec_.audio_weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::kInvalidArgument, "non-finite weight");
  }
  for (double w : spec_.text_weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::kInvalidArgument, "non-finite weight");
  }
  info_.model_id = spec_.model_id.empty()
                       ? "synthetic-" + std::string(SyntheticKindName(spec_.kind))
                       : spec_.model_id;
  info_.sample_rate_hz = spec_.sample_rate_hz;
  info_.max_audio_seconds = spec_.max_audio_seconds;
  info_.mask_token_id = synthetic_vocab::kMask;
  info_.protected_tokens = SyntheticMarkers();
  info_.max_batch = spec_.max_batch;
  info_.logit_tolerance = 0.0;
  info_.eos_token_ids = {synthetic_vocab::kEos};
}

double SyntheticEndpoint::AudioWeight(std::size_t i) const {
  return i < spec_.audio_weights.size() ? spec_.audio_weights[i]
                                        : spec_.audio_default_weight;
}

double SyntheticEndpoint::TextWeight(std::size_t i) const {
  return i < spec_.text_weights.size() ? spec_.text_weights[i]
                                       : spec_.text_default_weight;
}

double SyntheticEndpoint::GameValue(const std::vector<bool>& audio_present,
                                    const std::vector<bool>& text_present) const {
  const bool use_audio = spec_.kind != SyntheticKind::kDummyAudio &&
                         spec_.kind != SyntheticKind::kConstant;
  const bool use_text = spec_.kind != SyntheticKind::kDummyText &&
                        spec_.kind != SyntheticKind::kConstant;
  double g = 0.0;
  if (use_audio) {
    for (std::size_t i = 0; i < audio_present.size(); ++i) {
      if (audio_present[i]) g += AudioWeight(i);
    }
  }
  if (use_text) {
    for (std::size_t i = 0; i < text_present.size(); ++i) {
      if (text_present[i]) g += TextWeight(i);
    }
  }
  if (spec_.kind == SyntheticKind::kInteraction) {
    auto present = [&](const FeatureRef& f) {
      const auto& flags = f.audio ? audio_present : text_present;
      return f.index < flags.size() && flags[f.index];
    };
    for (const auto& [a, b] : spec_.interaction_pairs) {
      if (present(a) && present(b)) g += spec_.interaction_bonus;
    }
  }
  return g;
}

TokenizedPrompt SyntheticEndpoint::Tokenize(const std::string& text) const {
  return SyntheticTokenize(text, info_.protected_tokens);
}

AnswerTrace SyntheticEndpoint::Generate(
    std::span<const float> audio, std::span<const std::int64_t> token_ids) const {
  AnswerTrace trace;
  if (spec_.emit_only_eos) {
    trace.token_ids = {synthetic_vocab::kEos};
    trace.token_texts = {"</s>"};
  } else {
    for (auto& w : SplitWords(spec_.answer_text)) {
      trace.token_ids.push_back(SyntheticTokenId(w));
      trace.token_texts.push_back(std::move(w));
    }
  }
  for (std::size_t t = 0; t < trace.token_ids.size(); ++t) {
    trace.positions.push_back(static_cast<std::int64_t>(token_ids.size() + t));
  }
  const DecodedFeatures f = DecodeSyntheticFeatures(audio, token_ids);
  const double g = GameValue(f.audio_present, f.text_present);
  for (std::size_t t = 0; t < trace.token_ids.size(); ++t) {
    trace.baseline_logits.push_back(spec_.base + static_cast<double>(1 + t) * g);
  }
  trace.answer_text = spec_.emit_only_eos ? "" : spec_.answer_text;
  return trace;
}

std::vector<std::vector<double>> SyntheticEndpoint::Score(
    std::span<const ScoreVariant> variants,
    std::span<const std::int64_t> answer_token_ids,
    std::span<const std::int64_t> answer_positions) const {
  if (answer_token_ids.size() != answer_positions.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "answer_token_ids and answer_positions differ in length");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(variants.size());
  for (const ScoreVariant& v : variants) {
    const DecodedFeatures f = DecodeSyntheticFeatures(v.audio, v.token_ids);
    const double g = GameValue(f.audio_present, f.text_present);
    std::vector<double> row;
    for (std::size_t t = 0; t < answer_token_ids.size(); ++t) {
      row.push_back(spec_.base + static_cast<double>(1 + t) * g);
    }
    if (spec_.truncate_score_rows && !row.empty()) row.pop_back();
    rows.push_back(std::move(row));
  }
  return rows;
}

SyntheticClassifier::SyntheticClassifier(SyntheticClassifierSpec spec)
    : spec_(spec) {
  if (spec_.kind == SyntheticClassifierKind::kLogistic) spec_.classes = 2;
  if (spec_.classes == 0) {
    throw Error(ErrorCode::kInvalidArgument, "classifier needs classes");
  }
}

std::size_t SyntheticClassifier::class_count() const { return spec_.classes; }

std::vector<double> SyntheticClassifier::ClassProbabilities(
    std::span<const float> audio, std::span<const std::int64_t> token_ids) const {
  std::vector<double> p(spec_.classes, 0.0);
  switch (spec_.kind) {
    case SyntheticClassifierKind::kUniform:
      std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(spec_.classes));
      break;
    case SyntheticClassifierKind::kCertain:
      p[0] = 1.0;
      break;
    case SyntheticClassifierKind::kLogistic: {
      const DecodedFeatures f = DecodeSyntheticFeatures(audio, token_ids);
      const bool on = spec_.informative_window < f.audio_present.size() &&
                      f.audio_present[spec_.informative_window];
      const double z = spec_.bias + (on ? spec_.weight : 0.0);
      p[1] = 1.0 / (1.0 + std::exp(-z));
      p[0] = 1.0 - p[1];
      break;
    }
  }
  return p;
}

}  // namespace mmshap

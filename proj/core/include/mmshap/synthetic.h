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

// In-process reference models whose Shapley values are known in closed form.
//
// Synthetic models share a whitespace tokenizer with a fixed marker
// vocabulary. Everything before `<|user|>` is the system instruction and
// everything after it is the question. When scoring, a model recovers the
// coalition from its input alone: a text feature is absent when it carries
// the mask id, and an audio window is absent when all of its samples are
// zero. Clips fed to synthetic models therefore must not contain all-zero
// windows of their own.

#ifndef MMSHAP_SYNTHETIC_H_
#define MMSHAP_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmshap/model.h"

namespace mmshap {

namespace synthetic_vocab {
inline constexpr std::int64_t kMask = 0;
inline constexpr std::int64_t kEos = 1;
inline constexpr std::int64_t kSystem = 2;
inline constexpr std::int64_t kUser = 3;
}  // namespace synthetic_vocab

// Markers understood by the synthetic tokenizer, in id order starting at 2.
const std::vector<std::string>& SyntheticMarkers();

std::int64_t SyntheticTokenId(std::string_view surface);

// Tokenizes with the synthetic vocabulary.
TokenizedPrompt SyntheticTokenize(const std::string& text,
                                  const std::vector<std::string>& protected_surfaces);

enum class SyntheticKind { kAdditive, kDummyAudio, kDummyText, kInteraction, kConstant };

std::string_view SyntheticKindName(SyntheticKind kind);
std::optional<SyntheticKind> ParseSyntheticKind(std::string_view name);

// A feature named by modality and position within that modality.
struct FeatureRef {
  bool audio = true;
  std::size_t index = 0;
};

struct SyntheticModelSpec {
  SyntheticKind kind = SyntheticKind::kAdditive;
  // Per-feature weights; features past the end of a list use the modality
  // default.
  std::vector<double> audio_weights;
  std::vector<double> text_weights;
  double audio_default_weight = 1.0;
  double text_default_weight = 1.0;
  // Interaction kind: bonus added when both features of a pair are present.
  std::vector<std::pair<FeatureRef, FeatureRef>> interaction_pairs;
  double interaction_bonus = 1.0;
  double base = 0.0;

  std::string model_id;  // defaults to "synthetic-<kind>"
  std::string answer_text = "(B) Doorbell";
  bool emit_only_eos = false;
  // Drops the last logit of every scored row; exercises arity checks.
  bool truncate_score_rows = false;
  int sample_rate_hz = 16000;
  std::optional<double> max_audio_seconds = 30.0;
  std::size_t max_batch = 16;
};

// Named presets used by the CLI: additive, balanced, dummy_audio, dummy_text,
// interaction, constant. Throws kInvalidArgument for unknown names.
SyntheticModelSpec SyntheticPreset(std::string_view name);

// Closed-form game value for token t given present features.
// f_t(S) = base + (1 + t) * g(S), where g depends on the kind.
class SyntheticEndpoint : public ModelEndpoint {
 public:
  explicit SyntheticEndpoint(SyntheticModelSpec spec);

  const SyntheticModelSpec& spec() const { return spec_; }

  ModelInfo Describe() const override { return info_; }
  TokenizedPrompt Tokenize(const std::string& text) const override;
  AnswerTrace Generate(std::span<const float> audio,
                       std::span<const std::int64_t> token_ids) const override;
  std::vector<std::vector<double>> Score(
      std::span<const ScoreVariant> variants,
      std::span<const std::int64_t> answer_token_ids,
      std::span<const std::int64_t> answer_positions) const override;

  // g(S) for the present audio windows and text features.
  double GameValue(const std::vector<bool>& audio_present,
                   const std::vector<bool>& text_present) const;

 private:
  double AudioWeight(std::size_t i) const;
  double TextWeight(std::size_t i) const;

  SyntheticModelSpec spec_;
  ModelInfo info_;
};

enum class SyntheticClassifierKind { kUniform, kCertain, kLogistic };

// Classification counterpart. kLogistic puts
// sigmoid(bias + weight * [window present]) on class 1 of two classes and the
// rest on class 0; kCertain puts probability 1 on class 0.
struct SyntheticClassifierSpec {
  SyntheticClassifierKind kind = SyntheticClassifierKind::kUniform;
  std::size_t classes = 4;
  std::size_t informative_window = 0;
  double bias = -1.0;
  double weight = 3.0;
};

class SyntheticClassifier : public ClassifierEndpoint {
 public:
  explicit SyntheticClassifier(SyntheticClassifierSpec spec);

  std::size_t class_count() const override;
  std::vector<double> ClassProbabilities(
      std::span<const float> audio,
      std::span<const std::int64_t> token_ids) const override;

 private:
  SyntheticClassifierSpec spec_;
};

// Presence flags recovered from a (possibly masked) synthetic input.
struct DecodedFeatures {
  std::vector<bool> audio_present;
  std::vector<bool> text_present;
};
DecodedFeatures DecodeSyntheticFeatures(std::span<const float> audio,
                                        std::span<const std::int64_t> token_ids);

}  // namespace mmshap

#endif  // MMSHAP_SYNTHETIC_H_

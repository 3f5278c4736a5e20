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

// Shared domain types. Feature indices follow one convention everywhere:
// audio windows occupy [0, n_audio) and maskable text tokens occupy
// [n_audio, n_audio + n_text).

#ifndef MMSHAP_TYPES_H_
#define MMSHAP_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mmshap {

// Mono waveform. Amplitudes are expected in [-1, 1].
struct AudioClip {
  std::vector<float> samples;
  int sample_rate_hz = 16000;

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Throws kInvalidArgument when the clip cannot enter attribution (empty,
// non-positive rate or non-finite samples).
void ValidateClip(const AudioClip& clip);

// Half-open index range.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool empty() const { return size() == 0; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  friend bool operator==(const Span&, const Span&) = default;
};

enum class TokenRole { kMaskable, kProtected, kInstruction };

struct Token {
  std::int64_t id = 0;
  std::string text;
  TokenRole role = TokenRole::kProtected;
};

struct TokenizedPrompt {
  std::vector<Token> tokens;
  Span question_span;
  Span instruction_span;

  std::vector<std::int64_t> ids() const;
};

// Assigns each token its role: instruction tokens first, then question tokens
// whose surface is not protected become maskable, everything else is
// protected. Throws kInvalidArgument for spans outside the token list or
// overlapping spans.
TokenizedPrompt MakeTokenizedPrompt(
    std::vector<Token> tokens, Span question_span, Span instruction_span,
    std::span<const std::string> protected_surfaces);

struct FeaturePartition {
  std::size_t n_audio = 0;
  std::size_t n_text = 0;
  std::vector<Span> audio_windows;         // sample ranges, one per audio feature
  std::vector<std::size_t> text_positions;  // prompt positions, one per text feature

  std::size_t size() const { return n_audio + n_text; }
  bool is_audio(std::size_t feature) const { return feature < n_audio; }
  // Feature index of the text token at prompt position `position`, if any.
  std::optional<std::size_t> FeatureForPosition(std::size_t position) const;
  // Feature index of the audio window containing `sample`, if any.
  std::optional<std::size_t> FeatureForSample(std::size_t sample) const;
};

// Subset of feature indices considered present (unmasked).
class Coalition {
 public:
  Coalition() = default;
  explicit Coalition(std::size_t universe) : present_(universe, false) {}

  static Coalition Full(std::size_t universe);
  static Coalition Empty(std::size_t universe) { return Coalition(universe); }
  // Indices >= universe throw kIndexOutOfRange.
  static Coalition FromIndices(std::size_t universe,
                               std::span<const std::size_t> indices);

  std::size_t universe() const { return present_.size(); }
  bool contains(std::size_t j) const {
    return j < present_.size() && present_[j];
  }
  void insert(std::size_t j);
  void erase(std::size_t j);
  std::size_t count() const;
  std::vector<std::size_t> members() const;

  friend bool operator==(const Coalition&, const Coalition&) = default;

 private:
  std::vector<bool> present_;
};

struct AnswerTrace {
  std::vector<std::int64_t> token_ids;
  std::vector<std::int64_t> positions;
  std::vector<double> baseline_logits;
  std::vector<std::string> token_texts;  // optional, for reports and plots
  std::string answer_text;

  std::size_t size() const { return token_ids.size(); }
};

// Throws kProtocolViolation unless ids, positions and logits have the same
// nonzero length and every logit is finite.
void ValidateTrace(const AnswerTrace& trace);

enum class EstimatorMethod { kExact, kPermutation };

struct EstimatorMeta {
  EstimatorMethod method = EstimatorMethod::kPermutation;
  int permutations = 0;  // m; zero for the exact estimator
  std::uint64_t seed = 0;
  bool antithetic = true;
  std::int64_t evaluations = 0;
};

// Row-major features x tokens matrix of Shapley values, as produced by the
// estimators, plus the full- and empty-coalition values used for efficiency
// checks.
struct ShapleyValues {
  std::size_t feature_count = 0;
  std::size_t token_count = 0;
  std::vector<double> values;
  std::vector<double> full_value;
  std::vector<double> empty_value;
  EstimatorMeta meta;

  double at(std::size_t feature, std::size_t token) const {
    return values[feature * token_count + token];
  }
  double& at(std::size_t feature, std::size_t token) {
    return values[feature * token_count + token];
  }
};

struct AttributionMatrix {
  ShapleyValues shapley;
  FeaturePartition partition;

  std::size_t feature_count() const { return shapley.feature_count; }
  std::size_t token_count() const { return shapley.token_count; }
  double at(std::size_t feature, std::size_t token) const {
    return shapley.at(feature, token);
  }
};

// Throws kInvalidArgument if the row count disagrees with the partition or
// any entry is non-finite.
void ValidateAttribution(const AttributionMatrix& attribution);

struct ModalityScore {
  double phi_audio = 0.0;
  double phi_text = 0.0;
  // Empty when phi_audio + phi_text == 0.
  std::optional<double> a_shap;
  std::optional<double> t_shap;

  bool defined() const { return a_shap.has_value(); }
};

}  // namespace mmshap

#endif  // MMSHAP_TYPES_H_

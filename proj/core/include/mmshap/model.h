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

// The masked-inference contract every model backend implements. Masking is
// done by the caller; a backend only tokenizes, generates, and scores fixed
// answer tokens under whatever input it is handed.

#ifndef MMSHAP_MODEL_H_
#define MMSHAP_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmshap/types.h"

namespace mmshap {

struct ModelInfo {
  std::string model_id;
  int sample_rate_hz = 16000;
  std::optional<double> max_audio_seconds;
  std::int64_t mask_token_id = 0;
  std::vector<std::string> protected_tokens;
  std::size_t max_batch = 1;
  double logit_tolerance = 1e-4;
  // Terminator ids stripped from generated answers. Optional on the wire.
  std::vector<std::int64_t> eos_token_ids;

  friend bool operator==(const ModelInfo&, const ModelInfo&) = default;
};

struct ScoreVariant {
  std::vector<float> audio;
  std::vector<std::int64_t> token_ids;
};

class ModelEndpoint {
 public:
  virtual ~ModelEndpoint() = default;

  // Stable for the lifetime of the endpoint.
  virtual ModelInfo Describe() const = 0;

  // Token roles are assigned from Describe().protected_tokens.
  virtual TokenizedPrompt Tokenize(const std::string& text) const = 0;

  // Greedy generation on unmasked input. `audio` is at the declared rate.
  virtual AnswerTrace Generate(std::span<const float> audio,
                               std::span<const std::int64_t> token_ids) const = 0;

  // Teacher-forced logits of the fixed answer tokens, one row per variant.
  // Safe to call concurrently.
  virtual std::vector<std::vector<double>> Score(
      std::span<const ScoreVariant> variants,
      std::span<const std::int64_t> answer_token_ids,
      std::span<const std::int64_t> answer_positions) const = 0;
};

// Models that expose a class distribution rather than generated text.
class ClassifierEndpoint {
 public:
  virtual ~ClassifierEndpoint() = default;
  virtual std::size_t class_count() const = 0;
  virtual std::vector<double> ClassProbabilities(
      std::span<const float> audio,
      std::span<const std::int64_t> token_ids) const = 0;
};

}  // namespace mmshap

#endif  // MMSHAP_MODEL_H_

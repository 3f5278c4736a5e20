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

// Value functions that turn masked model evaluations into a game.

#ifndef MMSHAP_SCORING_H_
#define MMSHAP_SCORING_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mmshap/masking.h"
#include "mmshap/model.h"
#include "mmshap/shapley.h"
#include "mmshap/types.h"

namespace mmshap {

// Greedy answer on the unmasked input. Trailing terminator tokens are
// dropped; throws kEmptyGeneration if nothing else remains.
AnswerTrace BaselineAnswer(const ModelEndpoint& model, const AudioClip& clip,
                           const TokenizedPrompt& prompt);

struct GenerationScoringContext {
  AnswerTrace trace;
  AudioClip clip;
  TokenizedPrompt prompt;
  FeaturePartition partition;
  MaskPolicy policy;
};

struct GenerationScoringOptions {
  // Sum the answer tokens into one value before attribution, instead of
  // attributing each token separately.
  bool collapse_tokens = false;
};

// f_t(S) = logit of baseline answer token t, teacher-forced, under the input
// masked by S. The model must outlive this object.
class GenerationValueFunction : public ValueFunction {
 public:
  GenerationValueFunction(GenerationScoringContext context,
                          const ModelEndpoint& model,
                          GenerationScoringOptions options = {});

  std::size_t token_count() const override;
  std::size_t max_batch() const override { return max_batch_; }
  std::vector<std::vector<double>> Evaluate(
      std::span<const Coalition> coalitions) const override;

  const GenerationScoringContext& context() const { return context_; }

 private:
  GenerationScoringContext context_;
  const ModelEndpoint& model_;
  GenerationScoringOptions options_;
  std::size_t max_batch_;
};

// f_c(S) = probability of `class_id` under the masked input.
class ClassificationValueFunction : public ValueFunction {
 public:
  ClassificationValueFunction(const ClassifierEndpoint& model, AudioClip clip,
                              TokenizedPrompt prompt, FeaturePartition partition,
                              MaskPolicy policy, std::size_t class_id);

  std::size_t token_count() const override { return 1; }
  std::vector<std::vector<double>> Evaluate(
      std::span<const Coalition> coalitions) const override;

 private:
  const ClassifierEndpoint& model_;
  AudioClip clip_;
  TokenizedPrompt prompt_;
  FeaturePartition partition_;
  MaskPolicy policy_;
  std::size_t class_id_;
};

}  // namespace mmshap

#endif  // MMSHAP_SCORING_H_

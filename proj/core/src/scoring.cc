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

#include "mmshap/scoring.h"

#include <algorithm>
#include <string>

#include "mmshap/error.h"

namespace mmshap {

AnswerTrace BaselineAnswer(const ModelEndpoint& model, const AudioClip& clip,
                           const TokenizedPrompt& prompt) {
  ValidateClip(clip);
  const ModelInfo info = model.Describe();
  AnswerTrace trace = model.Generate(clip.samples, prompt.ids());

  auto is_eos = [&](std::int64_t id) {
    return std::find(info.eos_token_ids.begin(), info.eos_token_ids.end(), id) !=
           info.eos_token_ids.end();
  };
  while (!trace.token_ids.empty() && is_eos(trace.token_ids.back())) {
    trace.token_ids.pop_back();
    if (!trace.positions.empty()) trace.positions.pop_back();
    if (!trace.baseline_logits.empty()) trace.baseline_logits.pop_back();
    if (trace.token_texts.size() > trace.token_ids.size()) {
      trace.token_texts.pop_back();
    }
  }
  if (trace.token_ids.empty()) {
    throw Error(ErrorCode::kEmptyGeneration,
                "model " + info.model_id + " produced no answer tokens");
  }
  ValidateTrace(trace);
  return trace;
}

GenerationValueFunction::GenerationValueFunction(
    GenerationScoringContext context, const ModelEndpoint& model,
    GenerationScoringOptions options)
    : context_(std::move(context)),
      model_(model),
      options_(options),
      max_batch_(std::max<std::size_t>(1, model.Describe().max_batch)) {
  ValidateTrace(context_.trace);
}

std::size_t GenerationValueFunction::token_count() const {
  return options_.collapse_tokens ? 1 : context_.trace.size();
}

std::vector<std::vector<double>> GenerationValueFunction::Evaluate(
    std::span<const Coalition> coalitions) const {
  std::vector<ScoreVariant> variants;
  variants.reserve(coalitions.size());
  for (const Coalition& c : coalitions) {
    MaskedInput masked = ApplyCoalition(context_.clip, context_.prompt,
                                        context_.partition, c, context_.policy);
    variants.push_back({std::move(masked.samples), std::move(masked.token_ids)});
  }
  auto rows = model_.Score(variants, context_.trace.token_ids,
                           context_.trace.positions);
  if (rows.size() != variants.size()) {
    throw Error(ErrorCode::kProtocolViolation,
                "score returned " + std::to_string(rows.size()) + " rows for " +
                    std::to_string(variants.size()) + " variants");
  }
  for (auto& row : rows) {
    if (row.size() != context_.trace.size()) {
      throw Error(ErrorCode::kProtocolViolation,
                  "score returned " + std::to_string(row.size()) +
                      " logits for a " + std::to_string(context_.trace.size()) +
                      "-token answer");
    }
    if (options_.collapse_tokens) {
      double total = 0.0;
      for (double v : row) total += v;
      row.assign(1, total);
    }
  }
  return rows;
}

ClassificationValueFunction::ClassificationValueFunction(
    const ClassifierEndpoint& model, AudioClip clip, TokenizedPrompt prompt,
    FeaturePartition partition, MaskPolicy policy, std::size_t class_id)
    : model_(model),
      clip_(std::move(clip)),
      prompt_(std::move(prompt)),
      partition_(std::move(partition)),
      policy_(std::move(policy)),
      class_id_(class_id) {
  if (class_id_ >= model_.class_count()) {
    throw Error(ErrorCode::kInvalidArgument,
                "class " + std::to_string(class_id_) + " out of range");
  }
}

std::vector<std::vector<double>> ClassificationValueFunction::Evaluate(
    std::span<const Coalition> coalitions) const {
  std::vector<std::vector<double>> out;
  out.reserve(coalitions.size());
  for (const Coalition& c : coalitions) {
    const MaskedInput masked =
        ApplyCoalition(clip_, prompt_, partition_, c, policy_);
    const auto p = model_.ClassProbabilities(masked.samples, masked.token_ids);
    if (p.size() != model_.class_count()) {
      throw Error(ErrorCode::kProtocolViolation,
                  "classifier returned the wrong number of classes");
    }
    out.push_back({p[class_id_]});
  }
  return out;
}

}  // namespace mmshap

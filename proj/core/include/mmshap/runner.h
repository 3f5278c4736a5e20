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

// Per-question attribution pipeline and corpus orchestration.

#ifndef MMSHAP_RUNNER_H_
#define MMSHAP_RUNNER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmshap/corpus.h"
#include "mmshap/error.h"
#include "mmshap/model.h"
#include "mmshap/scoring.h"
#include "mmshap/shapley.h"
#include "mmshap/types.h"

namespace mmshap {

struct RunConfig {
  PromptMode mode = PromptMode::kMcNpi;
  PromptTemplate prompt_template = DefaultPromptTemplate();
  // estimator.seed is the run seed; each question derives its own from it.
  EstimatorConfig estimator;
  // When false, questions with at most auto_exact_max features use the exact
  // estimator regardless of estimator.method.
  bool estimator_explicit = false;
  std::size_t auto_exact_max = 12;
  // Applied on top of the model's own max_audio_seconds.
  std::optional<double> max_audio_seconds;
  GenerationScoringOptions scoring;
  // Questions in flight, and score requests in flight per question.
  std::size_t concurrency = 1;
  bool persist_attribution = true;
};

struct QuestionResult {
  std::string question_id;
  std::string model_id;
  PromptMode mode = PromptMode::kMcNpi;
  std::string answer_text;
  std::vector<std::string> answer_tokens;
  std::optional<std::string> matched_letter;  // empty = unparsed
  std::string correct_letter;
  bool is_correct = false;
  ModalityScore modality_score;
  std::optional<AttributionMatrix> attribution;
  std::vector<std::string> text_feature_surfaces;  // one per text feature
  std::size_t audio_samples = 0;
  int sample_rate_hz = 0;
  std::int64_t evaluation_count = 0;
  double wall_time_s = 0.0;
  EstimatorMeta estimator;
};

struct QuestionFailure {
  std::string question_id;
  ErrorCode code = ErrorCode::kInvalidArgument;
  std::string message;
};

struct RunOutcome {
  std::vector<QuestionResult> results;  // corpus order
  std::vector<QuestionFailure> failures;
};

// Stable per-question seed derived from the run seed and the question id.
std::uint64_t QuestionSeed(std::uint64_t run_seed, std::string_view question_id);

// resample/truncate -> tokenize -> baseline answer -> partition -> value
// function -> Shapley estimate -> modality score -> answer matching.
QuestionResult RunQuestion(const McQuestion& question, const AudioClip& audio,
                           const ModelEndpoint& model, const RunConfig& config);

// Runs every question, loading audio from question.audio_path. Per-question
// failures are collected rather than thrown. With a run directory,
// per-question files, run.json, failures.json and summary.json are written
// there.
RunOutcome RunCorpus(const std::vector<McQuestion>& questions,
                     const ModelEndpoint& model, const RunConfig& config,
                     const std::optional<std::filesystem::path>& run_dir = std::nullopt,
                     const std::function<void(const std::string&)>& log = {});

}  // namespace mmshap

#endif  // MMSHAP_RUNNER_H_

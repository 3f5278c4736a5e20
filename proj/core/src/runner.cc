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

#include "mmshap/runner.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "mmshap/audio.h"
#include "mmshap/masking.h"
#include "mmshap/metrics.h"
#include "mmshap/report.h"
#include "mmshap/results_io.h"

namespace mmshap {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t QuestionSeed(std::uint64_t run_seed, std::string_view question_id) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : question_id) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return SplitMix64(run_seed ^ h);
}

QuestionResult RunQuestion(const McQuestion& question, const AudioClip& audio,
                           const ModelEndpoint& model, const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const ModelInfo info = model.Describe();

  AudioClip clip = Resample(audio, info.sample_rate_hz);
  std::optional<double> limit = info.max_audio_seconds;
  if (config.max_audio_seconds) {
    limit = limit ? std::min(*limit, *config.max_audio_seconds)
                  : *config.max_audio_seconds;
  }
  if (limit) clip = TruncateClip(clip, *limit);
  ValidateClip(clip);

  const std::string text =
      BuildPrompt(question, config.prompt_template, config.mode);
  TokenizedPrompt prompt = model.Tokenize(text);
  AnswerTrace trace = BaselineAnswer(model, clip, prompt);

  MaskPolicy policy;
  policy.mask_token_id = info.mask_token_id;
  policy.protected_surfaces = info.protected_tokens;
  FeaturePartition partition = BuildPartition(clip, prompt, policy);
  const std::size_t n = partition.size();

  QuestionResult result;
  result.question_id = question.question_id;
  result.model_id = info.model_id;
  result.mode = config.mode;
  result.answer_text = trace.answer_text;
  result.answer_tokens = trace.token_texts;
  result.correct_letter = question.correct_letter;
  result.audio_samples = clip.size();
  result.sample_rate_hz = clip.sample_rate_hz;
  for (std::size_t pos : partition.text_positions) {
    result.text_feature_surfaces.push_back(prompt.tokens[pos].text);
  }
  if (config.scoring.collapse_tokens) {
    result.answer_tokens = {trace.answer_text};
  }

  EstimatorConfig cfg = config.estimator;
  cfg.seed = QuestionSeed(config.estimator.seed, question.question_id);
  cfg.max_in_flight = std::max<std::size_t>(1, config.concurrency);
  if (!config.estimator_explicit) {
    cfg.method = n <= config.auto_exact_max ? EstimatorMethod::kExact
                                            : EstimatorMethod::kPermutation;
  }

  const std::vector<double> baseline = trace.baseline_logits;
  GenerationValueFunction game(
      GenerationScoringContext{std::move(trace), clip, std::move(prompt),
                               partition, policy},
      model, config.scoring);
  ShapleyValues values = EstimateShapley(game, n, cfg);

  if (!config.scoring.collapse_tokens) {
    for (std::size_t t = 0; t < baseline.size(); ++t) {
      if (std::abs(values.full_value[t] - baseline[t]) > info.logit_tolerance) {
        throw Error(ErrorCode::kProtocolViolation,
                    "unmasked score differs from the generated logit of answer token " +
                        std::to_string(t));
      }
    }
  }

  AttributionMatrix attribution{std::move(values), std::move(partition)};
  result.modality_score = ModalityContribution(attribution);
  result.estimator = attribution.shapley.meta;
  result.evaluation_count = EvaluationBudget(n, cfg);
  result.attribution = std::move(attribution);

  result.matched_letter = MatchAnswer(result.answer_text, question.options);
  result.is_correct = result.matched_letter == question.correct_letter;
  result.wall_time_s = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  return result;
}

RunOutcome RunCorpus(const std::vector<McQuestion>& questions,
                     const ModelEndpoint& model, const RunConfig& config,
                     const std::optional<std::filesystem::path>& run_dir,
                     const std::function<void(const std::string&)>& log) {
  const ModelInfo info = model.Describe();
  if (run_dir) {
    std::filesystem::create_directories(*run_dir / "questions");
    WriteTextFile(*run_dir / "run.json", RunConfigToJson(config, info.model_id));
  }

  std::vector<std::optional<QuestionResult>> slots(questions.size());
  std::vector<std::optional<QuestionFailure>> failed(questions.size());
  std::mutex log_mutex;
  auto say = [&](const std::string& line) {
    if (!log) return;
    std::lock_guard lock(log_mutex);
    log(line);
  };

  auto process = [&](std::size_t i) {
    const McQuestion& q = questions[i];
    try {
      const AudioClip audio = ReadWav(q.audio_path);
      QuestionResult r = RunQuestion(q, audio, model, config);
      if (!config.persist_attribution) {
        QuestionResult stored = r;
        stored.attribution.reset();
        if (run_dir) SaveQuestionResult(*run_dir, stored);
      } else if (run_dir) {
        SaveQuestionResult(*run_dir, r);
      }
      say(q.question_id + ": answer \"" + r.answer_text + "\" A-SHAP " +
          (r.modality_score.a_shap ? std::to_string(*r.modality_score.a_shap)
                                   : std::string("undefined")));
      slots[i] = std::move(r);
    } catch (const Error& e) {
      failed[i] = QuestionFailure{q.question_id, e.code(), e.what()};
      say(q.question_id + ": failed: " + e.what());
    } catch (const std::exception& e) {
      failed[i] = QuestionFailure{q.question_id, ErrorCode::kIoError, e.what()};
      say(q.question_id + ": failed: " + e.what());
    }
  };

  const std::size_t workers =
      std::min(std::max<std::size_t>(1, config.concurrency), questions.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < questions.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < questions.size(); i = next++) process(i);
      });
    }
  }

  RunOutcome outcome;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    if (slots[i]) outcome.results.push_back(std::move(*slots[i]));
    if (failed[i]) outcome.failures.push_back(std::move(*failed[i]));
  }
  if (run_dir) {
    SaveFailures(*run_dir, outcome.failures);
    WriteTextFile(*run_dir / "summary.json",
                  FormatReport(AggregateReport(outcome.results), ReportFormat::kJson));
  }
  return outcome;
}

}  // namespace mmshap

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

#include <cmath>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mmshap/audio.h"
#include "mmshap/error.h"
#include "mmshap/results_io.h"
#include "mmshap/synthetic.h"
#include "test_util.h"

namespace mmshap {
namespace {

using testing_util::TempDir;
using testing_util::ToneClip;

McQuestion Question(const std::string& id = "q1") {
  McQuestion q;
  q.question_id = id;
  q.question_text = "Which sound is heard at the door?";
  q.options = {{"A", "Siren"}, {"B", "Doorbell"}, {"C", "Dog"}, {"D", "Rain"}};
  q.correct_letter = "B";
  return q;
}

// Forwards to a synthetic model and records the audio handed to Generate.
class RecordingEndpoint : public ModelEndpoint {
 public:
  explicit RecordingEndpoint(SyntheticModelSpec spec) : inner_(std::move(spec)) {}
  ModelInfo Describe() const override { return inner_.Describe(); }
  TokenizedPrompt Tokenize(const std::string& text) const override {
    return inner_.Tokenize(text);
  }
  AnswerTrace Generate(std::span<const float> audio,
                       std::span<const std::int64_t> ids) const override {
    std::lock_guard lock(mu_);
    generated_audio_.emplace_back(audio.begin(), audio.end());
    return inner_.Generate(audio, ids);
  }
  std::vector<std::vector<double>> Score(std::span<const ScoreVariant> v,
                                         std::span<const std::int64_t> ids,
                                         std::span<const std::int64_t> pos) const override {
    return inner_.Score(v, ids, pos);
  }
  std::vector<std::vector<float>> generated_audio() const {
    std::lock_guard lock(mu_);
    return generated_audio_;
  }

 private:
  SyntheticEndpoint inner_;
  mutable std::mutex mu_;
  mutable std::vector<std::vector<float>> generated_audio_;
};

TEST(RunQuestion, DummyAudioIsZero) {
  SyntheticEndpoint model(SyntheticPreset("dummy_audio"));
  const QuestionResult r = RunQuestion(Question(), ToneClip(8000), model, RunConfig{});
  ASSERT_TRUE(r.modality_score.defined());
  EXPECT_EQ(*r.modality_score.a_shap, 0.0);
  EXPECT_EQ(*r.modality_score.t_shap, 1.0);
}

TEST(RunQuestion, BalancedIsHalf) {
  SyntheticEndpoint model(SyntheticPreset("balanced"));
  const QuestionResult r = RunQuestion(Question(), ToneClip(8000), model, RunConfig{});
  ASSERT_TRUE(r.modality_score.defined());
  EXPECT_NEAR(*r.modality_score.a_shap, 0.5, 1e-9);
  EXPECT_EQ(r.matched_letter, "B");
  EXPECT_TRUE(r.is_correct);
  EXPECT_EQ(r.answer_tokens, (std::vector<std::string>{"(B)", "Doorbell"}));
}

TEST(RunQuestion, ExactAndPermutationAgreeOnEightFeatures) {
  SyntheticModelSpec spec = SyntheticPreset("interaction");
  spec.audio_weights = {0.9, 0.1, 0.3, 0.0};
  spec.text_weights = {0.2, 0.4, 0.05, 0.7};
  SyntheticEndpoint model(spec);
  RunConfig config;
  config.prompt_template.question_block_format = "<|question|> {question} <|answer|>";
  McQuestion q = Question();
  q.question_text = "what rings there ?";
  const AudioClip clip = ToneClip(40);

  config.estimator.method = EstimatorMethod::kExact;
  config.estimator_explicit = true;
  const QuestionResult exact = RunQuestion(q, clip, model, config);
  ASSERT_EQ(exact.attribution->partition.size(), 8);
  EXPECT_EQ(exact.evaluation_count, 256);

  config.estimator.method = EstimatorMethod::kPermutation;
  config.estimator.permutations = 1000;
  const QuestionResult perm = RunQuestion(q, clip, model, config);
  EXPECT_EQ(perm.evaluation_count, 1000 * 2 * 8 + 2);
  EXPECT_NEAR(*perm.modality_score.a_shap, *exact.modality_score.a_shap, 0.02);
}

TEST(RunQuestion, ExactIsAutoSelectedForSmallGames) {
  SyntheticEndpoint model(SyntheticPreset("additive"));
  RunConfig config;
  config.prompt_template.question_block_format = "<|question|> {question} <|answer|>";
  McQuestion q = Question();
  q.question_text = "a b c";
  const QuestionResult r = RunQuestion(q, ToneClip(300), model, config);
  EXPECT_EQ(r.estimator.method, EstimatorMethod::kExact);
  // Default prompt is far larger than twelve features.
  const QuestionResult big = RunQuestion(Question(), ToneClip(8000), model, RunConfig{});
  EXPECT_EQ(big.estimator.method, EstimatorMethod::kPermutation);
  EXPECT_EQ(big.estimator.permutations, 10);
  EXPECT_TRUE(big.estimator.antithetic);
}

TEST(RunQuestion, ResamplesAndTruncates) {
  SyntheticEndpoint model(SyntheticPreset("balanced"));
  RunConfig config;
  config.max_audio_seconds = 0.25;
  const QuestionResult r = RunQuestion(Question(), ToneClip(8000, 8000), model, config);
  EXPECT_EQ(r.sample_rate_hz, 16000);
  EXPECT_EQ(r.audio_samples, 4000);
}

TEST(RunQuestion, SeedsAreStablePerQuestion) {
  EXPECT_EQ(QuestionSeed(1, "q1"), QuestionSeed(1, "q1"));
  EXPECT_NE(QuestionSeed(1, "q1"), QuestionSeed(1, "q2"));
  EXPECT_NE(QuestionSeed(1, "q1"), QuestionSeed(2, "q1"));
  SyntheticEndpoint model(SyntheticPreset("interaction"));
  const auto a = RunQuestion(Question(), ToneClip(8000), model, RunConfig{});
  const auto b = RunQuestion(Question(), ToneClip(8000), model, RunConfig{});
  EXPECT_EQ(a.attribution->shapley.values, b.attribution->shapley.values);
  EXPECT_EQ(a.estimator.seed, QuestionSeed(0, "q1"));
}

TEST(RunQuestion, UnparsedAnswerIsIncorrect) {
  SyntheticModelSpec spec = SyntheticPreset("balanced");
  spec.answer_text = "hard to say";
  SyntheticEndpoint model(spec);
  const QuestionResult r = RunQuestion(Question(), ToneClip(8000), model, RunConfig{});
  EXPECT_FALSE(r.matched_letter.has_value());
  EXPECT_FALSE(r.is_correct);
}

TEST(RunCorpus, PromptModesSeeIdenticalAudio) {
  TempDir dir("modes");
  WriteWav(dir.path() / "a.wav", ToneClip(12000, 24000));
  McQuestion q = Question();
  q.audio_path = dir.path() / "a.wav";
  RecordingEndpoint model(SyntheticPreset("balanced"));
  RunConfig config;
  config.mode = PromptMode::kMcPi;
  RunCorpus({q}, model, config);
  config.mode = PromptMode::kMcNpi;
  RunCorpus({q}, model, config);
  const auto audio = model.generated_audio();
  ASSERT_EQ(audio.size(), 2);
  EXPECT_EQ(audio[0], audio[1]);
}

TEST(RunCorpus, FailuresAreCollectedAndPersisted) {
  TempDir dir("run");
  WriteWav(dir.path() / "ok.wav", ToneClip(8000));
  McQuestion good = Question("good");
  good.audio_path = dir.path() / "ok.wav";
  McQuestion missing = Question("missing");
  missing.audio_path = dir.path() / "nope.wav";
  SyntheticEndpoint model(SyntheticPreset("balanced"));
  RunConfig config;
  config.concurrency = 2;
  std::vector<std::string> lines;
  std::mutex mu;
  const RunOutcome out =
      RunCorpus({good, missing}, model, config, dir.path() / "run", [&](const std::string& l) {
        std::lock_guard lock(mu);
        lines.push_back(l);
      });
  ASSERT_EQ(out.results.size(), 1);
  ASSERT_EQ(out.failures.size(), 1);
  EXPECT_EQ(out.failures[0].question_id, "missing");
  EXPECT_EQ(out.failures[0].code, ErrorCode::kIoError);
  EXPECT_FALSE(lines.empty());
  for (const char* f : {"run.json", "failures.json", "summary.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "run" / f)) << f;
  }
  const RunDirectory loaded = LoadRunDirectory(dir.path() / "run");
  ASSERT_EQ(loaded.results.size(), 1);
  EXPECT_EQ(loaded.results[0].question_id, "good");
  EXPECT_EQ(loaded.failures.size(), 1);
  EXPECT_EQ(loaded.failures[0].code, ErrorCode::kIoError);
}

TEST(RunCorpus, EmptyGenerationIsPerQuestionFailure) {
  TempDir dir("eos");
  WriteWav(dir.path() / "ok.wav", ToneClip(8000));
  McQuestion q = Question();
  q.audio_path = dir.path() / "ok.wav";
  SyntheticModelSpec spec = SyntheticPreset("balanced");
  spec.emit_only_eos = true;
  SyntheticEndpoint model(spec);
  const RunOutcome out = RunCorpus({q}, model, RunConfig{});
  ASSERT_EQ(out.failures.size(), 1);
  EXPECT_EQ(out.failures[0].code, ErrorCode::kEmptyGeneration);
}

}  // namespace
}  // namespace mmshap

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

#include <cmath>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mmshap/error.h"

namespace mmshap {
namespace {

TEST(Coalition, FullEmptyAndMembers) {
  const Coalition full = Coalition::Full(5);
  EXPECT_EQ(full.count(), 5);
  EXPECT_EQ(Coalition::Empty(5).count(), 0);
  const std::vector<std::size_t> idx = {4, 1};
  const Coalition s = Coalition::FromIndices(5, idx);
  EXPECT_EQ(s.members(), (std::vector<std::size_t>{1, 4}));
  EXPECT_TRUE(s.contains(4));
  EXPECT_FALSE(s.contains(0));
  EXPECT_FALSE(s.contains(99));
}

TEST(Coalition, OutOfRangeThrows) {
  Coalition s(3);
  try {
    s.insert(3);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexOutOfRange);
  }
  const std::vector<std::size_t> idx = {7};
  EXPECT_THROW(Coalition::FromIndices(3, idx), Error);
}

TEST(Coalition, InsertErase) {
  Coalition s(4);
  s.insert(2);
  s.insert(2);
  EXPECT_EQ(s.count(), 1);
  s.erase(2);
  EXPECT_EQ(s, Coalition::Empty(4));
}

TEST(TokenizedPrompt, RolesFromSpans) {
  std::vector<Token> tokens = {{2, "<|system|>"}, {10, "be"},  {3, "<|user|>"},
                               {4, "<audio>"},    {11, "why"}, {12, "now"}};
  const std::vector<std::string> prot = {"<audio>"};
  const TokenizedPrompt p = MakeTokenizedPrompt(tokens, {3, 6}, {0, 2}, prot);
  EXPECT_EQ(p.tokens[0].role, TokenRole::kInstruction);
  EXPECT_EQ(p.tokens[1].role, TokenRole::kInstruction);
  EXPECT_EQ(p.tokens[2].role, TokenRole::kProtected);
  EXPECT_EQ(p.tokens[3].role, TokenRole::kProtected);
  EXPECT_EQ(p.tokens[4].role, TokenRole::kMaskable);
  EXPECT_EQ(p.tokens[5].role, TokenRole::kMaskable);
  EXPECT_EQ(p.ids(), (std::vector<std::int64_t>{2, 10, 3, 4, 11, 12}));
}

TEST(TokenizedPrompt, RejectsOverlappingSpans) {
  std::vector<Token> tokens(4);
  EXPECT_THROW(MakeTokenizedPrompt(tokens, {1, 4}, {0, 2}, {}), Error);
  EXPECT_THROW(MakeTokenizedPrompt(tokens, {1, 5}, {0, 1}, {}), Error);
}

TEST(FeaturePartition, Lookups) {
  FeaturePartition p;
  p.n_audio = 2;
  p.n_text = 2;
  p.audio_windows = {{0, 10}, {10, 25}};
  p.text_positions = {5, 7};
  EXPECT_EQ(p.size(), 4);
  EXPECT_TRUE(p.is_audio(1));
  EXPECT_FALSE(p.is_audio(2));
  EXPECT_EQ(p.FeatureForSample(12), 1);
  EXPECT_EQ(p.FeatureForSample(25), std::nullopt);
  EXPECT_EQ(p.FeatureForPosition(7), 3);
  EXPECT_EQ(p.FeatureForPosition(6), std::nullopt);
}

TEST(Validation, TraceArity) {
  AnswerTrace t;
  t.token_ids = {1, 2};
  t.positions = {5, 6};
  t.baseline_logits = {0.1};
  EXPECT_THROW(ValidateTrace(t), Error);
  t.baseline_logits.push_back(0.2);
  EXPECT_NO_THROW(ValidateTrace(t));
  EXPECT_THROW(ValidateTrace(AnswerTrace{}), Error);
}

TEST(Validation, Clip) {
  EXPECT_THROW(ValidateClip(AudioClip{}), Error);
  AudioClip bad{{0.1f, std::nanf("")}, 16000};
  EXPECT_THROW(ValidateClip(bad), Error);
  EXPECT_NO_THROW(ValidateClip(AudioClip{{0.1f}, 8000}));
}

TEST(Error, MessageCarriesCodeName) {
  const Error e(ErrorCode::kSchemaError, "questions[3].answer");
  EXPECT_EQ(std::string(e.what()), "SchemaError: questions[3].answer");
  EXPECT_TRUE(IsUnreachable(ErrorCode::kConnectFailed));
  EXPECT_FALSE(IsUnreachable(ErrorCode::kProtocolViolation));
}

}  // namespace
}  // namespace mmshap

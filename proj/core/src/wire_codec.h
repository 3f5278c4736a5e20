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

// JSON bodies of the /v1 masked-inference protocol, shared by the HTTP client
// and the stub server. Parsing failures throw kProtocolViolation.

#ifndef MMSHAP_SRC_WIRE_CODEC_H_
#define MMSHAP_SRC_WIRE_CODEC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmshap/model.h"
#include "mmshap/types.h"

namespace mmshap::wire {

using nlohmann::json;

json Parse(const std::string& body);

json EncodeInfo(const ModelInfo& info);
ModelInfo DecodeInfo(const json& j);

// Tokenize response. Roles are not transmitted.
json EncodeTokens(const TokenizedPrompt& prompt);
struct WireTokens {
  std::vector<Token> tokens;
  Span question_span;
  Span instruction_span;
};
WireTokens DecodeTokens(const json& j);

json EncodeGenerateRequest(std::span<const float> audio,
                           std::span<const std::int64_t> token_ids);
json EncodeTrace(const AnswerTrace& trace);
AnswerTrace DecodeTrace(const json& j);

json EncodeScoreRequest(std::span<const ScoreVariant> variants,
                        std::span<const std::int64_t> answer_token_ids,
                        std::span<const std::int64_t> answer_positions);
struct ScoreRequest {
  std::vector<ScoreVariant> variants;
  std::vector<std::int64_t> answer_token_ids;
  std::vector<std::int64_t> answer_positions;
};
ScoreRequest DecodeScoreRequest(const json& j);
json EncodeLogits(const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> DecodeLogits(const json& j);

json ErrorBody(const std::string& code, const std::string& message);

std::vector<std::int64_t> IntList(const json& j, const char* field);
Span DecodeSpan(const json& j, const char* field);

}  // namespace mmshap::wire

#endif  // MMSHAP_SRC_WIRE_CODEC_H_

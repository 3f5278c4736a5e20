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

#include "wire_codec.h"

#include "mmshap/audio.h"
#include "mmshap/error.h"

namespace mmshap::wire {
namespace {

[[noreturn]] void Violation(const std::string& what) {
  throw Error(ErrorCode::kProtocolViolation, what);
}

const json& Field(const json& j, const char* field) {
  if (!j.is_object()) Violation("expected a JSON object");
  auto it = j.find(field);
  if (it == j.end()) Violation(std::string("missing field '") + field + "'");
  return *it;
}

std::string StringField(const json& j, const char* field) {
  const json& v = Field(j, field);
  if (!v.is_string()) Violation(std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

std::int64_t IntField(const json& j, const char* field) {
  const json& v = Field(j, field);
  if (!v.is_number_integer()) {
    Violation(std::string("field '") + field + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

double NumberField(const json& j, const char* field) {
  const json& v = Field(j, field);
  if (!v.is_number()) Violation(std::string("field '") + field + "' must be a number");
  return v.get<double>();
}

std::vector<double> NumberList(const json& v, const char* what) {
  if (!v.is_array()) Violation(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& x : v) {
    if (!x.is_number()) Violation(std::string(what) + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

json Parse(const std::string& body) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) Violation("body is not valid JSON");
  return j;
}

std::vector<std::int64_t> IntList(const json& j, const char* field) {
  const json& v = Field(j, field);
  if (!v.is_array()) Violation(std::string("field '") + field + "' must be an array");
  std::vector<std::int64_t> out;
  out.reserve(v.size());
  for (const json& x : v) {
    if (!x.is_number_integer()) {
      Violation(std::string("field '") + field + "' must hold integers");
    }
    out.push_back(x.get<std::int64_t>());
  }
  return out;
}

Span DecodeSpan(const json& j, const char* field) {
  const auto v = IntList(j, field);
  if (v.size() != 2 || v[0] < 0 || v[1] < v[0]) {
    Violation(std::string("field '") + field + "' must be [start, end]");
  }
  return {static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1])};
}

json EncodeInfo(const ModelInfo& info) {
  json j = {{"model_id", info.model_id},
            {"sample_rate_hz", info.sample_rate_hz},
            {"max_audio_seconds", nullptr},
            {"mask_token_id", info.mask_token_id},
            {"protected_tokens", info.protected_tokens},
            {"max_batch", info.max_batch},
            {"logit_tolerance", info.logit_tolerance}};
  if (info.max_audio_seconds) j["max_audio_seconds"] = *info.max_audio_seconds;
  if (!info.eos_token_ids.empty()) j["eos_token_ids"] = info.eos_token_ids;
  return j;
}

ModelInfo DecodeInfo(const json& j) {
  ModelInfo info;
  info.model_id = StringField(j, "model_id");
  info.sample_rate_hz = static_cast<int>(IntField(j, "sample_rate_hz"));
  if (info.sample_rate_hz <= 0) Violation("sample_rate_hz must be positive");
  const json& max_s = Field(j, "max_audio_seconds");
  if (max_s.is_number()) {
    info.max_audio_seconds = max_s.get<double>();
  } else if (!max_s.is_null()) {
    Violation("max_audio_seconds must be a number or null");
  }
  info.mask_token_id = IntField(j, "mask_token_id");
  const json& prot = Field(j, "protected_tokens");
  if (!prot.is_array()) Violation("protected_tokens must be an array");
  for (const json& p : prot) {
    if (!p.is_string()) Violation("protected_tokens must hold strings");
    info.protected_tokens.push_back(p.get<std::string>());
  }
  const std::int64_t max_batch = IntField(j, "max_batch");
  if (max_batch < 1) Violation("max_batch must be at least 1");
  info.max_batch = static_cast<std::size_t>(max_batch);
  info.logit_tolerance = NumberField(j, "logit_tolerance");
  if (j.contains("eos_token_ids")) info.eos_token_ids = IntList(j, "eos_token_ids");
  return info;
}

json EncodeTokens(const TokenizedPrompt& prompt) {
  json tokens = json::array();
  for (const Token& t : prompt.tokens) {
    tokens.push_back({{"id", t.id}, {"text", t.text}});
  }
  return {{"tokens", tokens},
          {"question_span", {prompt.question_span.begin, prompt.question_span.end}},
          {"instruction_span",
           {prompt.instruction_span.begin, prompt.instruction_span.end}}};
}

WireTokens DecodeTokens(const json& j) {
  WireTokens out;
  const json& tokens = Field(j, "tokens");
  if (!tokens.is_array()) Violation("tokens must be an array");
  for (const json& t : tokens) {
    out.tokens.push_back({IntField(t, "id"), StringField(t, "text"),
                          TokenRole::kProtected});
  }
  out.question_span = DecodeSpan(j, "question_span");
  out.instruction_span = DecodeSpan(j, "instruction_span");
  if (out.question_span.end > out.tokens.size() ||
      out.instruction_span.end > out.tokens.size()) {
    Violation("token span exceeds token count");
  }
  return out;
}

json EncodeGenerateRequest(std::span<const float> audio,
                           std::span<const std::int64_t> token_ids) {
  return {{"audio_f32_b64", EncodeF32Base64(audio)},
          {"token_ids", std::vector<std::int64_t>(token_ids.begin(), token_ids.end())},
          {"greedy", true}};
}

json EncodeTrace(const AnswerTrace& trace) {
  return {{"answer_token_ids", trace.token_ids},
          {"answer_positions", trace.positions},
          {"answer_logits", trace.baseline_logits},
          {"answer_text", trace.answer_text}};
}

AnswerTrace DecodeTrace(const json& j) {
  AnswerTrace trace;
  trace.token_ids = IntList(j, "answer_token_ids");
  trace.positions = IntList(j, "answer_positions");
  trace.baseline_logits = NumberList(Field(j, "answer_logits"), "answer_logits");
  trace.answer_text = StringField(j, "answer_text");
  if (trace.token_ids.size() != trace.positions.size() ||
      trace.token_ids.size() != trace.baseline_logits.size()) {
    Violation("generate response arrays differ in length");
  }
  return trace;
}

json EncodeScoreRequest(std::span<const ScoreVariant> variants,
                        std::span<const std::int64_t> answer_token_ids,
                        std::span<const std::int64_t> answer_positions) {
  json vs = json::array();
  for (const ScoreVariant& v : variants) {
    vs.push_back({{"audio_f32_b64", EncodeF32Base64(v.audio)},
                  {"token_ids", v.token_ids}});
  }
  return {{"variants", vs},
          {"answer_token_ids",
           std::vector<std::int64_t>(answer_token_ids.begin(), answer_token_ids.end())},
          {"answer_positions",
           std::vector<std::int64_t>(answer_positions.begin(), answer_positions.end())}};
}

ScoreRequest DecodeScoreRequest(const json& j) {
  ScoreRequest req;
  const json& vs = Field(j, "variants");
  if (!vs.is_array()) Violation("variants must be an array");
  for (const json& v : vs) {
    req.variants.push_back({DecodeF32Base64(StringField(v, "audio_f32_b64")),
                            IntList(v, "token_ids")});
  }
  req.answer_token_ids = IntList(j, "answer_token_ids");
  req.answer_positions = IntList(j, "answer_positions");
  return req;
}

json EncodeLogits(const std::vector<std::vector<double>>& rows) {
  return {{"logits", rows}};
}

std::vector<std::vector<double>> DecodeLogits(const json& j) {
  const json& rows = Field(j, "logits");
  if (!rows.is_array()) Violation("logits must be an array");
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const json& r : rows) out.push_back(NumberList(r, "logit row"));
  return out;
}

json ErrorBody(const std::string& code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

}  // namespace mmshap::wire

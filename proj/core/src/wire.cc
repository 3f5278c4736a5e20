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

#include "mmshap/wire.h"

#include <algorithm>
#include <thread>

#include "httplib.h"
#include "mmshap/error.h"
#include "wire_codec.h"

namespace mmshap {
namespace {

bool IsTimeout(httplib::Error e) {
  return e == httplib::Error::ConnectionTimeout || e == httplib::Error::Read ||
         e == httplib::Error::Write;
}

Error ReplyError(int status, const std::string& body) {
  std::string code = "http_" + std::to_string(status);
  std::string message = body;
  const wire::json j = wire::json::parse(body, nullptr, false);
  if (!j.is_discarded() && j.is_object() && j.contains("error") &&
      j["error"].is_object()) {
    const auto& e = j["error"];
    if (e.contains("code") && e["code"].is_string()) code = e["code"];
    if (e.contains("message") && e["message"].is_string()) message = e["message"];
  }
  const ErrorCode kind =
      status == 503 ? ErrorCode::kModelUnavailable : ErrorCode::kModelError;
  return Error(kind, "server replied " + std::to_string(status) + " (" + code +
                         "): " + message);
}

}  // namespace

HttpEndpoint::HttpEndpoint(std::string base_url, WireOptions options)
    : base_url_(std::move(base_url)),
      options_(std::move(options)),
      in_flight_(std::make_unique<std::counting_semaphore<>>(
          static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, options_.max_in_flight)))) {
  const auto scheme_end = base_url_.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "endpoint URL needs a scheme: " + base_url_);
  }
  const auto path_start = base_url_.find('/', scheme_end + 3);
  host_ = base_url_.substr(0, path_start);
  if (path_start != std::string::npos) {
    prefix_ = base_url_.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
}

std::unique_ptr<HttpEndpoint> HttpEndpoint::Connect(const std::string& base_url,
                                                    WireOptions options) {
  std::unique_ptr<HttpEndpoint> endpoint(
      new HttpEndpoint(base_url, std::move(options)));
  endpoint->info_ = wire::DecodeInfo(
      wire::Parse(endpoint->Call("GET", "/v1/describe", "", true)));
  return endpoint;
}

std::string HttpEndpoint::Call(const std::string& method, const std::string& path,
                               const std::string& body, bool idempotent) const {
  httplib::Client client(host_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  if (!options_.bearer_token.empty()) {
    client.set_bearer_token_auth(options_.bearer_token);
  }

  const int attempts = idempotent ? 1 + std::max(0, options_.retry.max_retries) : 1;
  auto backoff = options_.retry.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    httplib::Result res = method == "GET"
                              ? client.Get(prefix_ + path)
                              : client.Post(prefix_ + path, body, "application/json");
    std::optional<Error> failure;
    if (!res) {
      const httplib::Error e = res.error();
      failure = IsTimeout(e)
                    ? Error(ErrorCode::kTimeout, method + " " + path + " timed out")
                    : Error(ErrorCode::kConnectFailed,
                            "cannot reach " + base_url_ + ": " + httplib::to_string(e));
    } else if (res->status >= 200 && res->status < 300) {
      return res->body;
    } else if (res->status < 500) {
      throw ReplyError(res->status, res->body);
    } else {
      failure = ReplyError(res->status, res->body);
    }
    if (attempt >= attempts) throw *failure;
    std::this_thread::sleep_for(backoff);
    backoff = std::chrono::milliseconds(static_cast<std::int64_t>(
        static_cast<double>(backoff.count()) * options_.retry.multiplier));
  }
}

TokenizedPrompt HttpEndpoint::Tokenize(const std::string& text) const {
  const wire::json req = {{"text", text}};
  auto t = wire::DecodeTokens(
      wire::Parse(Call("POST", "/v1/tokenize", req.dump(), true)));
  return MakeTokenizedPrompt(std::move(t.tokens), t.question_span,
                             t.instruction_span, info_.protected_tokens);
}

AnswerTrace HttpEndpoint::Generate(std::span<const float> audio,
                                   std::span<const std::int64_t> token_ids) const {
  const wire::json req = wire::EncodeGenerateRequest(audio, token_ids);
  return wire::DecodeTrace(
      wire::Parse(Call("POST", "/v1/generate", req.dump(), false)));
}

std::vector<std::vector<double>> HttpEndpoint::ScoreChunk(
    std::span<const ScoreVariant> variants,
    std::span<const std::int64_t> answer_token_ids,
    std::span<const std::int64_t> answer_positions) const {
  const wire::json req =
      wire::EncodeScoreRequest(variants, answer_token_ids, answer_positions);
  in_flight_->acquire();
  std::string body;
  try {
    body = Call("POST", "/v1/score", req.dump(), true);
  } catch (...) {
    in_flight_->release();
    throw;
  }
  in_flight_->release();
  auto rows = wire::DecodeLogits(wire::Parse(body));
  if (rows.size() != variants.size()) {
    throw Error(ErrorCode::kProtocolViolation,
                "score returned " + std::to_string(rows.size()) + " rows for " +
                    std::to_string(variants.size()) + " variants");
  }
  for (const auto& row : rows) {
    if (row.size() != answer_token_ids.size()) {
      throw Error(ErrorCode::kProtocolViolation,
                  "score returned " + std::to_string(row.size()) +
                      " logits for a " + std::to_string(answer_token_ids.size()) +
                      "-token answer");
    }
  }
  return rows;
}

std::vector<std::vector<double>> HttpEndpoint::Score(
    std::span<const ScoreVariant> variants,
    std::span<const std::int64_t> answer_token_ids,
    std::span<const std::int64_t> answer_positions) const {
  const std::size_t batch = std::max<std::size_t>(1, info_.max_batch);
  std::vector<std::vector<double>> rows;
  rows.reserve(variants.size());
  for (std::size_t begin = 0; begin < variants.size(); begin += batch) {
    const std::size_t len = std::min(batch, variants.size() - begin);
    auto chunk = ScoreChunk(variants.subspan(begin, len), answer_token_ids,
                            answer_positions);
    for (auto& r : chunk) rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace mmshap

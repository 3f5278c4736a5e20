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

// HTTP+JSON client for the /v1 masked-inference protocol.

#ifndef MMSHAP_WIRE_H_
#define MMSHAP_WIRE_H_

#include <chrono>
#include <cstddef>
#include <memory>
#include <semaphore>
#include <string>

#include "mmshap/model.h"

namespace mmshap {

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{100};
  double multiplier = 2.0;
};

struct WireOptions {
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;
  // Concurrent /v1/score requests allowed through this endpoint object.
  std::size_t max_in_flight = 4;
  // Sent as "Authorization: Bearer <token>" when nonempty.
  std::string bearer_token;
};

class HttpEndpoint : public ModelEndpoint {
 public:
  // Connects and caches /v1/describe. Throws kConnectFailed, kTimeout or
  // kProtocolViolation.
  static std::unique_ptr<HttpEndpoint> Connect(const std::string& base_url,
                                               WireOptions options = {});

  ModelInfo Describe() const override { return info_; }
  TokenizedPrompt Tokenize(const std::string& text) const override;
  // Never retried once the request was sent.
  AnswerTrace Generate(std::span<const float> audio,
                       std::span<const std::int64_t> token_ids) const override;
  std::vector<std::vector<double>> Score(
      std::span<const ScoreVariant> variants,
      std::span<const std::int64_t> answer_token_ids,
      std::span<const std::int64_t> answer_positions) const override;

  const std::string& base_url() const { return base_url_; }

 private:
  HttpEndpoint(std::string base_url, WireOptions options);

  // Returns the response body of a 2xx reply; maps transport and error
  // replies onto mmshap::Error.
  std::string Call(const std::string& method, const std::string& path,
                   const std::string& body, bool idempotent) const;
  std::vector<std::vector<double>> ScoreChunk(
      std::span<const ScoreVariant> variants,
      std::span<const std::int64_t> answer_token_ids,
      std::span<const std::int64_t> answer_positions) const;

  std::string base_url_;
  std::string host_;    // scheme://host:port
  std::string prefix_;  // path prefix, no trailing slash
  WireOptions options_;
  ModelInfo info_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace mmshap

#endif  // MMSHAP_WIRE_H_

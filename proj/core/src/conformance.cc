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

#include "mmshap/conformance.h"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "httplib.h"
#include "mmshap/error.h"
#include "mmshap/masking.h"
#include "wire_codec.h"

namespace mmshap {
namespace {

constexpr const char* kProbePrompt =
    "<|system|> You're a reliable assistant, follow these instructions. "
    "<|user|> <audio> #Audio <|question|> Which sound effect can be heard in "
    "the piece? (A) Whistle (B) Doorbell (C) Siren (D) Thunder <|answer|>";

AudioClip ProbeClip(const ModelInfo& info) {
  double seconds = 1.0;
  if (info.max_audio_seconds) seconds = std::min(seconds, *info.max_audio_seconds);
  AudioClip clip;
  clip.sample_rate_hz = info.sample_rate_hz;
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::floor(seconds * info.sample_rate_hz)));
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / info.sample_rate_hz;
    clip.samples[i] =
        static_cast<float>(0.25 + 0.5 * std::sin(2 * std::numbers::pi * 440.0 * t));
  }
  return clip;
}

double MaxAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

class Suite {
 public:
  explicit Suite(ConformanceReport& report) : report_(report) {}

  // Runs `fn`, recording a failure for any exception. Returns pass/fail.
  bool Check(const std::string& name, const std::function<std::string()>& fn) {
    ConformanceCheck c{name, false, ""};
    try {
      c.detail = fn();
      c.passed = true;
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    report_.checks.push_back(c);
    return c.passed;
  }

 private:
  ConformanceReport& report_;
};

void Expect(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorCode::kProtocolViolation, what);
}

// Posts a raw body and expects a 4xx reply carrying a protocol error body.
std::string ExpectRejected(const std::string& base_url, const WireOptions& options,
                           const std::string& path, const std::string& body) {
  const auto scheme_end = base_url.find("://");
  const auto path_start = base_url.find('/', scheme_end + 3);
  httplib::Client client(base_url.substr(0, path_start));
  const std::string prefix =
      path_start == std::string::npos ? "" : base_url.substr(path_start);
  if (!options.bearer_token.empty()) client.set_bearer_token_auth(options.bearer_token);
  auto res = client.Post(prefix + path, body, "application/json");
  Expect(static_cast<bool>(res), "no reply: " + httplib::to_string(res.error()));
  Expect(res->status >= 400 && res->status < 500,
         "expected a 4xx status, got " + std::to_string(res->status));
  const auto j = wire::json::parse(res->body, nullptr, false);
  Expect(!j.is_discarded() && j.contains("error") && j["error"].is_object() &&
             j["error"].contains("code") && j["error"]["code"].is_string() &&
             j["error"].contains("message") && j["error"]["message"].is_string(),
         "error reply lacks {\"error\": {\"code\", \"message\"}}");
  return "rejected with " + std::to_string(res->status) + " " +
         j["error"]["code"].get<std::string>();
}

}  // namespace

bool ConformanceReport::passed() const {
  if (checks.empty()) return false;
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string ConformanceReport::Summary() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << ": " << c.detail;
    out << "\n";
  }
  return out.str();
}

ConformanceReport RunConformanceSuite(const std::string& base_url,
                                      const WireOptions& options) {
  ConformanceReport report;
  Suite suite(report);

  std::unique_ptr<HttpEndpoint> endpoint;
  if (!suite.Check("describe", [&] {
        endpoint = HttpEndpoint::Connect(base_url, options);
        const ModelInfo info = endpoint->Describe();
        Expect(!info.model_id.empty(), "model_id is empty");
        Expect(info.logit_tolerance >= 0, "logit_tolerance is negative");
        return info.model_id + " @ " + std::to_string(info.sample_rate_hz) + " Hz";
      })) {
    return report;
  }
  const ModelInfo info = endpoint->Describe();
  const double tol = info.logit_tolerance;

  suite.Check("describe_stable", [&] {
    auto again = HttpEndpoint::Connect(base_url, options);
    Expect(again->Describe() == info, "describe changed between calls");
    return std::string();
  });

  TokenizedPrompt prompt;
  const bool tokenized = suite.Check("tokenize", [&] {
    prompt = endpoint->Tokenize(kProbePrompt);
    Expect(!prompt.tokens.empty(), "no tokens");
    Expect(!prompt.question_span.empty(), "empty question span");
    return std::to_string(prompt.tokens.size()) + " tokens";
  });
  if (!tokenized) return report;

  const AudioClip clip = ProbeClip(info);
  AnswerTrace trace;
  const bool generated = suite.Check("generate", [&] {
    trace = endpoint->Generate(clip.samples, prompt.ids());
    Expect(!trace.token_ids.empty(), "empty answer");
    return "\"" + trace.answer_text + "\"";
  });
  if (!generated) return report;

  suite.Check("generate_deterministic", [&] {
    const AnswerTrace again = endpoint->Generate(clip.samples, prompt.ids());
    Expect(again.token_ids == trace.token_ids, "greedy answers differ");
    Expect(MaxAbsDiff(again.baseline_logits, trace.baseline_logits) <= tol,
           "greedy logits differ");
    return std::string();
  });

  suite.Check("score_matches_generate", [&] {
    const ScoreVariant full{clip.samples, prompt.ids()};
    const auto rows = endpoint->Score(std::span(&full, 1), trace.token_ids,
                                      trace.positions);
    const double d = MaxAbsDiff(rows.at(0), trace.baseline_logits);
    Expect(d <= tol, "full-input logits differ from generate by " + std::to_string(d));
    return "max |diff| " + std::to_string(d);
  });

  suite.Check("batched_equals_unbatched", [&] {
    MaskPolicy policy;
    policy.mask_token_id = info.mask_token_id;
    policy.protected_surfaces = info.protected_tokens;
    const FeaturePartition partition = BuildPartition(clip, prompt, policy);
    const std::size_t n = partition.size();
    std::vector<ScoreVariant> variants;
    const std::size_t count = std::min<std::size_t>(std::max<std::size_t>(2, info.max_batch), 4);
    for (std::size_t k = 0; k < count; ++k) {
      Coalition c = Coalition::Full(n);
      for (std::size_t j = k; j < n; j += count) c.erase(j);
      MaskedInput m = ApplyCoalition(clip, prompt, partition, c, policy);
      variants.push_back({std::move(m.samples), std::move(m.token_ids)});
    }
    const auto batched = endpoint->Score(variants, trace.token_ids, trace.positions);
    for (std::size_t k = 0; k < variants.size(); ++k) {
      const auto single = endpoint->Score(std::span(&variants[k], 1),
                                          trace.token_ids, trace.positions);
      Expect(MaxAbsDiff(batched.at(k), single.at(0)) <= tol,
             "variant " + std::to_string(k) + " differs when batched");
    }
    return std::to_string(variants.size()) + " variants";
  });

  suite.Check("score_rejects_arity_mismatch", [&] {
    const ScoreVariant full{clip.samples, prompt.ids()};
    std::vector<std::int64_t> positions = trace.positions;
    positions.push_back(positions.empty() ? 0 : positions.back() + 1);
    const auto body =
        wire::EncodeScoreRequest(std::span(&full, 1), trace.token_ids, positions);
    return ExpectRejected(base_url, options, "/v1/score", body.dump());
  });

  suite.Check("rejects_malformed_json", [&] {
    return ExpectRejected(base_url, options, "/v1/score", "{not json");
  });

  suite.Check("tokenize_rejects_missing_text", [&] {
    return ExpectRejected(base_url, options, "/v1/tokenize", "{\"txt\": 1}");
  });

  return report;
}

}  // namespace mmshap

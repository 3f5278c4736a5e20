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

#include "mmshap/stub_server.h"

#include "httplib.h"
#include "mmshap/audio.h"
#include "mmshap/error.h"
#include "wire_codec.h"

namespace mmshap {
namespace {

void Reply(httplib::Response& res, int status, const wire::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  Reply(res, status, wire::ErrorBody(code, message));
}

}  // namespace

StubServer::StubServer(std::shared_ptr<const ModelEndpoint> model,
                       StubServerOptions options)
    : model_(std::move(model)),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  InstallRoutes();
}

StubServer::~StubServer() { Stop(); }

std::string StubServer::url() const {
  return "http://" + options_.host + ":" + std::to_string(port_);
}

void StubServer::InstallRoutes() {
  // Wraps a handler with auth, JSON parsing and error mapping.
  auto guarded = [this](auto handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      if (!options_.bearer_token.empty() &&
          req.get_header_value("Authorization") !=
              "Bearer " + options_.bearer_token) {
        ReplyError(res, 401, "unauthorized", "missing or wrong bearer token");
        return;
      }
      try {
        handler(req, res);
      } catch (const Error& e) {
        const bool client_fault = e.code() == ErrorCode::kProtocolViolation ||
                                  e.code() == ErrorCode::kInvalidArgument;
        ReplyError(res, client_fault ? 400 : 500,
                   client_fault ? "invalid_argument" : "internal", e.what());
      } catch (const std::exception& e) {
        ReplyError(res, 500, "internal", e.what());
      }
    };
  };

  server_->Get("/v1/describe", guarded([this](const httplib::Request&,
                                              httplib::Response& res) {
    Reply(res, 200, wire::EncodeInfo(model_->Describe()));
  }));

  server_->Post("/v1/tokenize", guarded([this](const httplib::Request& req,
                                               httplib::Response& res) {
    const wire::json body = wire::Parse(req.body);
    if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
      throw Error(ErrorCode::kInvalidArgument, "field 'text' must be a string");
    }
    Reply(res, 200, wire::EncodeTokens(model_->Tokenize(body["text"])));
  }));

  server_->Post("/v1/generate", guarded([this](const httplib::Request& req,
                                               httplib::Response& res) {
    const wire::json body = wire::Parse(req.body);
    if (body.contains("greedy") &&
        !(body["greedy"].is_boolean() && body["greedy"].get<bool>())) {
      throw Error(ErrorCode::kInvalidArgument, "only greedy decoding is supported");
    }
    if (!body.contains("audio_f32_b64") || !body["audio_f32_b64"].is_string()) {
      throw Error(ErrorCode::kInvalidArgument, "field 'audio_f32_b64' must be a string");
    }
    const auto audio = DecodeF32Base64(body["audio_f32_b64"].get<std::string>());
    const auto ids = wire::IntList(body, "token_ids");
    Reply(res, 200, wire::EncodeTrace(model_->Generate(audio, ids)));
  }));

  server_->Post("/v1/score", guarded([this](const httplib::Request& req,
                                            httplib::Response& res) {
    const wire::ScoreRequest sr = wire::DecodeScoreRequest(wire::Parse(req.body));
    if (sr.answer_token_ids.size() != sr.answer_positions.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "answer_token_ids and answer_positions differ in length");
    }
    if (sr.variants.size() > model_->Describe().max_batch) {
      throw Error(ErrorCode::kInvalidArgument, "batch exceeds max_batch");
    }
    Reply(res, 200,
          wire::EncodeLogits(model_->Score(sr.variants, sr.answer_token_ids,
                                           sr.answer_positions)));
  }));

  server_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      ReplyError(res, res.status, res.status == 404 ? "not_found" : "error",
                 "request failed with status " + std::to_string(res.status));
    }
  });
}

void StubServer::Bind() {
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
  } else {
    port_ = server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
  }
  if (port_ < 0) {
    throw Error(ErrorCode::kIoError, "cannot bind " + options_.host + ":" +
                                         std::to_string(options_.port));
  }
}

void StubServer::Start() {
  Bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void StubServer::Run(const std::function<void(const std::string&)>& on_bound) {
  Bind();
  if (on_bound) on_bound(url());
  server_->listen_after_bind();
}

void StubServer::Stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace mmshap

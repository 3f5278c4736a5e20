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

#ifndef MMSHAP_STUB_SERVER_H_
#define MMSHAP_STUB_SERVER_H_

#include <functional>
#include <memory>
#include <string>
#include <thread>

#include "mmshap/model.h"

namespace httplib {
class Server;
}

namespace mmshap {

struct StubServerOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  // Requests must carry this bearer token when nonempty.
  std::string bearer_token;
};

// Serves any in-process ModelEndpoint over the /v1 protocol. Used as the
// protocol conformance stub and for end-to-end tests.
class StubServer {
 public:
  StubServer(std::shared_ptr<const ModelEndpoint> model,
             StubServerOptions options = {});
  ~StubServer();

  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  // Binds and starts serving on a background thread. Throws kIoError if the
  // address cannot be bound.
  void Start();
  // Binds, calls `on_bound` with the server URL, then serves on the calling
  // thread until Stop() is called.
  void Run(const std::function<void(const std::string&)>& on_bound = {});
  void Stop();

  int port() const { return port_; }
  std::string url() const;

 private:
  void Bind();
  void InstallRoutes();

  std::shared_ptr<const ModelEndpoint> model_;
  StubServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace mmshap

#endif  // MMSHAP_STUB_SERVER_H_

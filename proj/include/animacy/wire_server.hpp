// Copyright 2026 The Animacy Harness Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <memory>
#include <string>
#include <thread>

#include "animacy/backend.hpp"

namespace httplib {
class Server;
}

namespace animacy {

/// Serves any Backend over the JSON wire protocol. Used to expose the
/// reference model to remote clients and as a test fixture for the client.
///
/// Beyond the three core endpoints it answers GET /v1/vocab?page=N with
/// pages of `page_size` token strings. When `inline_token_strings` is false,
/// /v1/next_distribution omits token_strings and clients must page them.
class WireServer {
 public:
  struct Options {
    bool inline_token_strings = true;
    std::size_t page_size = 1024;
  };

  WireServer(const Backend& backend, Options options);
  explicit WireServer(const Backend& backend) : WireServer(backend, Options{}) {}
  ~WireServer();

  WireServer(const WireServer&) = delete;
  WireServer& operator=(const WireServer&) = delete;

  // Binds to host:port (port 0 picks a free port) and serves on a background
  // thread. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);

  // Blocks serving on the calling thread.
  void listen(const std::string& host, int port);

  void stop();

  std::string url() const;

 private:
  void install_routes();

  const Backend& backend_;
  Options options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = 0;
};

}  // namespace animacy

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

#include "animacy/wire_server.hpp"

#include <cmath>

#include "animacy/error.hpp"
#include "httplib.h"

namespace animacy {
namespace {

using nlohmann::json;

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

WireServer::WireServer(const Backend& backend, Options options)
    : backend_(backend), options_(options), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

WireServer::~WireServer() { stop(); }

void WireServer::install_routes() {
  server_->Get("/v1/info", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, backend_.info());
  });

  server_->Get("/v1/vocab", [this](const httplib::Request& req, httplib::Response& res) {
    const auto size = backend_.descriptor().vocab_size;
    const auto page_size = std::max<std::size_t>(1, options_.page_size);
    const std::size_t num_pages = (size + page_size - 1) / page_size;
    std::size_t page = 0;
    if (req.has_param("page")) page = std::stoul(req.get_param_value("page"));
    if (page >= num_pages) {
      reply(res, 404, {{"error", "page out of range"}});
      return;
    }
    // Any context gives the token strings; the empty one is always valid.
    const auto dist = backend_.next_distribution("");
    const std::size_t lo = page * page_size;
    const std::size_t hi = std::min(size, lo + page_size);
    json strings = json::array();
    for (std::size_t i = lo; i < hi; ++i) strings.push_back(dist.token_strings.at(i));
    reply(res, 200, {{"page", page}, {"num_pages", num_pages}, {"token_strings", strings}});
  });

  server_->Post("/v1/next_distribution",
                [this](const httplib::Request& req, httplib::Response& res) {
                  try {
                    const auto body = json::parse(req.body);
                    const auto dist =
                        backend_.next_distribution(body.at("context").get<std::string>());
                    json logprobs = json::array();
                    for (double p : dist.probabilities) logprobs.push_back(std::log(p));
                    json out = {{"vocab_size", dist.size()},
                                {"logprobs", std::move(logprobs)},
                                {"model", backend_.descriptor().name}};
                    if (options_.inline_token_strings) out["token_strings"] = dist.token_strings;
                    reply(res, 200, out);
                  } catch (const json::exception& e) {
                    reply(res, 400, {{"error", e.what()}});
                  } catch (const std::exception& e) {
                    reply(res, 422, {{"error", e.what()}});
                  }
                });

  server_->Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto body = json::parse(req.body);
      const auto scored = backend_.score_continuation(
          body.at("context").get<std::string>(), body.at("continuation").get<std::string>());
      reply(res, 200, {{"token_logprobs", scored.token_logprobs},
                       {"token_texts", scored.token_texts},
                       {"boundary_merged", scored.boundary_merged},
                       {"model", backend_.descriptor().name}});
    } catch (const json::exception& e) {
      reply(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
      reply(res, 422, {{"error", e.what()}});
    }
  });
}

int WireServer::start(const std::string& host, int port) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) throw BackendError("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void WireServer::listen(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  if (!server_->listen(host, port)) {
    throw BackendError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void WireServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string WireServer::url() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

}  // namespace animacy

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

#include "animacy/remote_backend.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "animacy/error.hpp"
#include "httplib.h"

namespace animacy {
namespace {

using nlohmann::json;

std::unique_ptr<httplib::Client> make_client(const RemoteConfig& config) {
  auto client = std::make_unique<httplib::Client>(config.url);
  const auto secs = static_cast<time_t>(config.timeout_s);
  const auto usecs = static_cast<time_t>((config.timeout_s - static_cast<double>(secs)) * 1e6);
  client->set_connection_timeout(secs, usecs);
  client->set_read_timeout(secs, usecs);
  client->set_write_timeout(secs, usecs);
  return client;
}

template <typename Fn>
json with_retries(const RemoteConfig& config, const std::string& path, Fn&& send) {
  std::string last_error;
  const int attempts = std::max(1, config.retries + 1);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    }
    auto client = make_client(config);
    httplib::Result res = send(*client);
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error " + std::to_string(res->status) + ": " + res->body;
      continue;
    }
    if (res->status != 200) {
      throw BackendError(path + " returned status " + std::to_string(res->status) +
                         ": " + res->body);
    }
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      throw BackendError(path + " returned malformed JSON: " + e.what());
    }
  }
  throw BackendError(config.url + path + " failed after " + std::to_string(attempts) +
                     " attempt(s): " + last_error);
}

}  // namespace

TokenDistribution parse_distribution_payload(const json& payload, std::string context,
                                             std::size_t vocab_size) {
  TokenDistribution dist;
  dist.context = std::move(context);
  try {
    const auto advertised = payload.at("vocab_size").get<std::size_t>();
    if (advertised != vocab_size) {
      throw BackendError("server vocab_size " + std::to_string(advertised) +
                         " differs from /v1/info vocab_size " + std::to_string(vocab_size));
    }
    const auto& logprobs = payload.at("logprobs");
    if (!logprobs.is_array() || logprobs.size() != vocab_size) {
      throw BackendError("logprobs length " + std::to_string(logprobs.size()) +
                         " differs from vocab_size " + std::to_string(vocab_size));
    }
    dist.probabilities.reserve(vocab_size);
    for (const auto& lp : logprobs) {
      if (!lp.is_number()) throw BackendError("non-numeric logprob");
      dist.probabilities.push_back(std::exp(lp.get<double>()));
    }
    if (auto it = payload.find("token_strings"); it != payload.end() && !it->is_null()) {
      dist.token_strings = it->get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed next_distribution payload: ") + e.what());
  }
  validate_distribution(dist, vocab_size);
  double total = 0.0;
  for (double p : dist.probabilities) total += p;
  for (double& p : dist.probabilities) p /= total;
  return dist;
}

ScoredContinuation parse_score_payload(const json& payload, std::string context,
                                       std::string continuation) {
  ScoredContinuation out;
  out.context = std::move(context);
  out.continuation = std::move(continuation);
  try {
    out.token_logprobs = payload.at("token_logprobs").get<std::vector<double>>();
    out.token_texts = payload.value("token_texts", std::vector<std::string>{});
    out.boundary_merged = payload.value("boundary_merged", false);
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed score payload: ") + e.what());
  }
  if (!out.token_texts.empty() && out.token_texts.size() != out.token_logprobs.size()) {
    throw BackendError("token_texts and token_logprobs differ in length");
  }
  validate_scored(out);
  return out;
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  info_ = get("/v1/info");
  try {
    descriptor_.name = info_.at("model").get<std::string>();
    descriptor_.vocab_size = info_.at("vocab_size").get<std::size_t>();
    descriptor_.adds_bos = info_.value("adds_bos", false);
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed /v1/info payload: ") + e.what());
  }
  descriptor_.kind = BackendKind::remote;
  try {
    validate_descriptor(descriptor_);
  } catch (const ValidationError& e) {
    throw BackendError(e.what());
  }
}

json RemoteBackend::get(const std::string& path) const {
  return with_retries(config_, path, [&](httplib::Client& c) { return c.Get(path); });
}

json RemoteBackend::post(const std::string& path, const json& body) const {
  const std::string payload = body.dump();
  return with_retries(config_, path, [&](httplib::Client& c) {
    return c.Post(path, payload, "application/json");
  });
}

const std::vector<std::string>& RemoteBackend::vocabulary() const {
  std::call_once(vocab_once_, [this] {
    std::vector<std::string> strings;
    try {
      std::size_t page = 0;
      std::size_t num_pages = 1;
      while (page < num_pages) {
        auto j = get("/v1/vocab?page=" + std::to_string(page));
        num_pages = j.value("num_pages", std::size_t{1});
        for (auto& s : j.at("token_strings")) strings.push_back(s.get<std::string>());
        ++page;
      }
    } catch (const std::exception&) {
      strings.clear();
    }
    if (strings.size() != descriptor_.vocab_size) {
      strings.clear();
      for (std::size_t i = 0; i < descriptor_.vocab_size; ++i) {
        strings.push_back("[" + std::to_string(i) + "]");
      }
    }
    vocab_ = std::move(strings);
  });
  return vocab_;
}

TokenDistribution RemoteBackend::next_distribution(std::string_view context) const {
  auto payload = post("/v1/next_distribution", {{"context", context}});
  auto dist = parse_distribution_payload(payload, std::string(context), descriptor_.vocab_size);
  if (dist.token_strings.empty()) dist.token_strings = vocabulary();
  return dist;
}

ScoredContinuation RemoteBackend::score_continuation(std::string_view context,
                                                     std::string_view continuation) const {
  if (continuation.empty()) throw ValidationError("empty continuation");
  auto payload = post("/v1/score", {{"context", context},
                                    {"continuation", continuation},
                                    {"add_bos", descriptor_.adds_bos}});
  return parse_score_payload(payload, std::string(context), std::string(continuation));
}

}  // namespace animacy

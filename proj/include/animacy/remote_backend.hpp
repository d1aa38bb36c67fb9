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
#include <mutex>
#include <string>
#include <vector>

#include "animacy/backend.hpp"

namespace animacy {

struct RemoteConfig {
  std::string url = "http://127.0.0.1:8080";  // scheme://host:port
  double timeout_s = 60.0;
  int retries = 2;  // additional attempts after the first failure
};

/// Client for an external model server speaking the JSON wire protocol:
///
///   GET  /v1/info             -> {model, vocab_size, adds_bos}
///   POST /v1/next_distribution {context} -> {vocab_size, logprobs, token_strings?, model}
///   POST /v1/score            {context, continuation, add_bos}
///                             -> {token_logprobs, token_texts, boundary_merged, model}
///   GET  /v1/vocab?page=N     -> {page, num_pages, token_strings}   (optional)
///
/// Each request uses its own connection, so concurrent calls never share
/// transport state.
class RemoteBackend final : public Backend {
 public:
  // Contacts /v1/info; throws BackendError if the server is unreachable.
  explicit RemoteBackend(RemoteConfig config);

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  TokenDistribution next_distribution(std::string_view context) const override;
  ScoredContinuation score_continuation(
      std::string_view context, std::string_view continuation) const override;
  nlohmann::json info() const override { return info_; }

  const RemoteConfig& config() const { return config_; }

 private:
  nlohmann::json get(const std::string& path) const;
  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;
  const std::vector<std::string>& vocabulary() const;

  RemoteConfig config_;
  BackendDescriptor descriptor_;
  nlohmann::json info_;

  mutable std::once_flag vocab_once_;
  mutable std::vector<std::string> vocab_;
};

// Parses a /v1/next_distribution payload against the advertised vocabulary
// size; exposed for tests of wire-format handling.
TokenDistribution parse_distribution_payload(const nlohmann::json& payload,
                                             std::string context,
                                             std::size_t vocab_size);

ScoredContinuation parse_score_payload(const nlohmann::json& payload,
                                       std::string context,
                                       std::string continuation);

}  // namespace animacy

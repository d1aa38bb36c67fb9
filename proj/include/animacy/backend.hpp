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

/**
 * Language-model backend contract.
 *
 * Every experiment queries a model exclusively through `Backend`:
 *
 *  - next_distribution(context)   full-vocabulary next-token distribution
 *  - score_continuation(ctx, s)   autoregressive log-probabilities of the
 *                                 tokens of `s` following `ctx`
 *
 * Log-probabilities are natural-log at this layer. Conversion to bits is done
 * by the scoring module.
 *
 * Implementations must be safe to call concurrently from several threads.
 */

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace animacy {

enum class BackendKind { reference_ngram, remote };

std::string_view to_string(BackendKind kind);

struct BackendDescriptor {
  std::string name;
  BackendKind kind = BackendKind::reference_ngram;
  std::size_t vocab_size = 0;
  bool adds_bos = false;
};

// Throws ValidationError when vocab_size < 2 or the name is empty.
void validate_descriptor(const BackendDescriptor& descriptor);

struct TokenDistribution {
  std::string context;
  std::vector<double> probabilities;
  std::vector<std::string> token_strings;

  std::size_t size() const { return probabilities.size(); }
};

struct ScoredContinuation {
  std::string context;
  std::string continuation;
  std::vector<double> token_logprobs;
  std::vector<std::string> token_texts;
  bool boundary_merged = false;
};

// Probability mass tolerance for distributions crossing the backend boundary.
inline constexpr double kNormalizationTolerance = 1e-6;

// Checks length, strict positivity and normalization. Throws BackendError.
void validate_distribution(const TokenDistribution& dist,
                           std::size_t vocab_size,
                           double tolerance = kNormalizationTolerance);

// Checks nonempty, finite, non-positive log-probabilities. Throws BackendError.
void validate_scored(const ScoredContinuation& scored);

class Backend {
 public:
  virtual ~Backend() = default;

  virtual const BackendDescriptor& descriptor() const = 0;

  virtual TokenDistribution next_distribution(std::string_view context) const = 0;

  // `continuation` must carry its natural leading whitespace (" oar").
  virtual ScoredContinuation score_continuation(
      std::string_view context, std::string_view continuation) const = 0;

  // Payload in the shape of GET /v1/info.
  virtual nlohmann::json info() const;
};

}  // namespace animacy

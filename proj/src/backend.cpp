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

#include "animacy/backend.hpp"

#include <cmath>
#include <sstream>

#include "animacy/error.hpp"

namespace animacy {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::reference_ngram:
      return "reference_ngram";
    case BackendKind::remote:
      return "remote";
  }
  return "unknown";
}

void validate_descriptor(const BackendDescriptor& descriptor) {
  if (descriptor.name.empty()) {
    throw ValidationError("backend name must be nonempty");
  }
  if (descriptor.vocab_size < 2) {
    throw ValidationError("backend vocab_size must be >= 2, got " +
                          std::to_string(descriptor.vocab_size));
  }
}

void validate_distribution(const TokenDistribution& dist,
                           std::size_t vocab_size, double tolerance) {
  if (dist.probabilities.size() != vocab_size) {
    std::ostringstream msg;
    msg << "distribution has " << dist.probabilities.size()
        << " entries, backend vocabulary has " << vocab_size;
    throw BackendError(msg.str());
  }
  if (!dist.token_strings.empty() && dist.token_strings.size() != vocab_size) {
    throw BackendError("token_strings length does not match vocabulary");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
    const double p = dist.probabilities[i];
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw BackendError("non-positive probability at token " +
                         std::to_string(i));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "distribution sums to " << total;
    throw BackendError(msg.str());
  }
}

void validate_scored(const ScoredContinuation& scored) {
  if (scored.token_logprobs.empty()) {
    throw BackendError("scored continuation has no tokens");
  }
  for (double lp : scored.token_logprobs) {
    if (!std::isfinite(lp) || lp > 1e-12) {
      throw BackendError("invalid token log-probability");
    }
  }
}

nlohmann::json Backend::info() const {
  const auto& d = descriptor();
  return {{"model", d.name}, {"vocab_size", d.vocab_size}, {"adds_bos", d.adds_bos}};
}

}  // namespace animacy

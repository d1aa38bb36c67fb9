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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "animacy/backend.hpp"
#include "animacy/stimuli.hpp"

namespace animacy {

struct DivergenceRecord {
  std::string item_id;
  double d_AO_bits = 0.0;  // animacy divergence
  double d_IO_bits = 0.0;
  double d_AI_bits = 0.0;
  std::string human_entity_used;

  bool operator==(const DivergenceRecord&) const = default;
};

struct ContinuationList {
  std::string context;
  std::vector<std::pair<std::string, double>> entries;
};

/// D_KL(p || q) = sum_v p(v) log2(p(v) / q(v)).
///
/// Both distributions must cover the same vocabulary and be strictly
/// positive; no smoothing is applied. Throws ValidationError otherwise.
double kl_bits(const TokenDistribution& p, const TokenDistribution& q);
double kl_bits(std::span<const double> p, std::span<const double> q);

// Next-token distributions after each of an item's three sentences. A
// sentence equal to an earlier one reuses its distribution.
struct ReferenceDistributions {
  TokenDistribution O;
  TokenDistribution I;
  TokenDistribution A;
};
ReferenceDistributions reference_distributions(const Backend& backend, const LowContextItem& item);

// D(A||O), D(I||O), D(A||I).
DivergenceRecord animacy_divergences(const Backend& backend, const LowContextItem& item);
DivergenceRecord animacy_divergences(const LowContextItem& item, const ReferenceDistributions& d);

// Ascending by d_AO_bits, ties by item_id.
std::vector<DivergenceRecord> rank_by_animacy_divergence(std::vector<DivergenceRecord> records);

// k most probable tokens, probability-descending, ties by token index.
ContinuationList top_k(const TokenDistribution& dist, std::size_t k);
ContinuationList top_k_continuations(const Backend& backend, std::string_view context,
                                     std::size_t k);

}  // namespace animacy

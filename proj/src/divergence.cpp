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

#include "animacy/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "animacy/error.hpp"

namespace animacy {

double kl_bits(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw ValidationError("KL divergence over mismatched vocabularies (" +
                          std::to_string(p.size()) + " vs " + std::to_string(q.size()) + ")");
  }
  if (p.empty()) throw ValidationError("KL divergence of empty distributions");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0) || !(q[i] > 0.0)) {
      throw ValidationError("KL divergence needs strictly positive probabilities (index " +
                            std::to_string(i) + ")");
    }
    total += p[i] * std::log2(p[i] / q[i]);
  }
  // Only rounding can make the sum negative (Gibbs' inequality).
  return std::max(0.0, total);
}

double kl_bits(const TokenDistribution& p, const TokenDistribution& q) {
  if (!p.token_strings.empty() && !q.token_strings.empty() &&
      p.token_strings != q.token_strings) {
    throw ValidationError("KL divergence over mismatched vocabularies");
  }
  return kl_bits(p.probabilities, q.probabilities);
}

ReferenceDistributions reference_distributions(const Backend& backend, const LowContextItem& item) {
  ReferenceDistributions d;
  d.O = backend.next_distribution(item.sentence_O);
  d.I = item.sentence_I == item.sentence_O ? d.O : backend.next_distribution(item.sentence_I);
  if (item.sentence_A == item.sentence_O) {
    d.A = d.O;
  } else if (item.sentence_A == item.sentence_I) {
    d.A = d.I;
  } else {
    d.A = backend.next_distribution(item.sentence_A);
  }
  return d;
}

DivergenceRecord animacy_divergences(const LowContextItem& item, const ReferenceDistributions& d) {
  DivergenceRecord r;
  r.item_id = item.item_id;
  r.d_AO_bits = kl_bits(d.A, d.O);
  r.d_IO_bits = kl_bits(d.I, d.O);
  r.d_AI_bits = kl_bits(d.A, d.I);
  r.human_entity_used = item.human_entity;
  return r;
}

DivergenceRecord animacy_divergences(const Backend& backend, const LowContextItem& item) {
  return animacy_divergences(item, reference_distributions(backend, item));
}

std::vector<DivergenceRecord> rank_by_animacy_divergence(std::vector<DivergenceRecord> records) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    if (a.d_AO_bits != b.d_AO_bits) return a.d_AO_bits < b.d_AO_bits;
    return a.item_id < b.item_id;
  });
  return records;
}

ContinuationList top_k(const TokenDistribution& dist, std::size_t k) {
  if (k == 0) throw ValidationError("k must be positive");
  if (k > dist.size()) {
    throw ValidationError("k = " + std::to_string(k) + " exceeds the vocabulary size " +
                          std::to_string(dist.size()));
  }
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double pa = dist.probabilities[a];
                      const double pb = dist.probabilities[b];
                      return pa != pb ? pa > pb : a < b;
                    });
  ContinuationList out;
  out.context = dist.context;
  for (std::size_t i = 0; i < k; ++i) {
    const auto id = order[i];
    std::string token = id < dist.token_strings.size() ? dist.token_strings[id]
                                                        : "[" + std::to_string(id) + "]";
    out.entries.emplace_back(std::move(token), dist.probabilities[id]);
  }
  return out;
}

ContinuationList top_k_continuations(const Backend& backend, std::string_view context,
                                     std::size_t k) {
  if (k > backend.descriptor().vocab_size) {
    throw ValidationError("k = " + std::to_string(k) + " exceeds the vocabulary size");
  }
  return top_k(backend.next_distribution(context), k);
}

}  // namespace animacy

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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "animacy/backend.hpp"

namespace animacy {

/**
 * Additively smoothed n-gram model with exact conditional probabilities.
 *
 *   P(v | h) = (count(h, v) + alpha) / (count(h, .) + alpha * |V|)
 *
 * h is the previous `order - 1` tokens. Every corpus sequence is left-padded
 * with `order - 1` begin sentinels. The begin sentinel only appears in
 * histories and is never predicted, so |V| is the number of distinct corpus
 * tokens (the end sentinel included). Vocabulary order: ordinary tokens
 * sorted lexicographically, then `</s>`.
 *
 * Immutable after construction.
 */
class ReferenceLM final : public Backend {
 public:
  static ReferenceLM build(std::span<const std::vector<std::string>> corpus,
                           int order, double alpha,
                           std::string name = "reference-ngram");

  // Tokenizes each line with tokenize() before building.
  static ReferenceLM build_from_lines(std::span<const std::string> lines,
                                      int order, double alpha,
                                      std::string name = "reference-ngram");

  // Reads a UTF-8 text file with one training sequence per line. Empty lines
  // and lines starting with '#' are skipped.
  static ReferenceLM load_corpus_file(const std::string& path, int order,
                                      double alpha,
                                      std::string name = "reference-ngram");

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  std::optional<std::size_t> token_id(std::string_view token) const;

  // P(token | history) where `history` is any token sequence; only its last
  // order-1 tokens matter and it is padded with begin sentinels if shorter.
  double probability(std::span<const std::string> history,
                     std::string_view token) const;

  std::vector<double> conditional(std::span<const std::string> history) const;

  std::uint64_t history_count(std::span<const std::string> history) const;

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  TokenDistribution next_distribution(std::string_view context) const override;
  ScoredContinuation score_continuation(
      std::string_view context, std::string_view continuation) const override;
  nlohmann::json info() const override;

 private:
  // History ids: vocabulary ids, kBos for the sentinel, kUnknown for tokens
  // outside the vocabulary (such histories never match a count).
  static constexpr std::int64_t kBos = -1;
  static constexpr std::int64_t kUnknown = -2;

  struct HistoryCounts {
    std::uint64_t total = 0;
    std::map<std::size_t, std::uint64_t> next;
  };

  ReferenceLM() = default;

  std::vector<std::int64_t> history_key(std::span<const std::string> history) const;
  const HistoryCounts* find(const std::vector<std::int64_t>& key) const;

  int order_ = 1;
  double alpha_ = 1.0;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::vector<std::int64_t>, HistoryCounts> counts_;
  BackendDescriptor descriptor_;
};

}  // namespace animacy

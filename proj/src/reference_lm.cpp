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

#include "animacy/reference_lm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "animacy/error.hpp"
#include "animacy/tokenize.hpp"

namespace animacy {
namespace {

// Drops leading begin sentinels; the model pads histories itself.
std::span<const std::string> strip_leading_bos(std::span<const std::string> tokens) {
  std::size_t k = 0;
  while (k < tokens.size() && tokens[k] == kBeginSentinel) ++k;
  return tokens.subspan(k);
}

}  // namespace

ReferenceLM ReferenceLM::build(std::span<const std::vector<std::string>> corpus,
                               int order, double alpha, std::string name) {
  if (order < 1) throw ValidationError("n-gram order must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("smoothing constant alpha must be positive");
  }

  std::vector<std::vector<std::string>> sequences;
  for (const auto& raw : corpus) {
    auto body = strip_leading_bos(raw);
    if (body.empty()) continue;
    std::vector<std::string> seq(body.begin(), body.end());
    if (seq.back() != kEndSentinel) seq.emplace_back(kEndSentinel);
    for (const auto& tok : seq) {
      if (tok == kBeginSentinel) {
        throw ValidationError("begin sentinel inside a corpus sequence");
      }
    }
    sequences.push_back(std::move(seq));
  }
  if (sequences.empty()) throw ValidationError("empty corpus");

  ReferenceLM lm;
  lm.order_ = order;
  lm.alpha_ = alpha;

  std::set<std::string> unique;
  for (const auto& seq : sequences) unique.insert(seq.begin(), seq.end());
  unique.erase(std::string(kEndSentinel));
  lm.vocab_.assign(unique.begin(), unique.end());
  lm.vocab_.emplace_back(kEndSentinel);
  for (std::size_t i = 0; i < lm.vocab_.size(); ++i) lm.index_.emplace(lm.vocab_[i], i);

  const std::size_t context_len = static_cast<std::size_t>(order - 1);
  for (const auto& seq : sequences) {
    std::vector<std::int64_t> ids(context_len, kBos);
    for (const auto& tok : seq) ids.push_back(static_cast<std::int64_t>(lm.index_.at(tok)));
    for (std::size_t i = 0; i < seq.size(); ++i) {
      std::vector<std::int64_t> key(ids.begin() + static_cast<std::ptrdiff_t>(i),
                                    ids.begin() + static_cast<std::ptrdiff_t>(i + context_len));
      auto& entry = lm.counts_[key];
      entry.total += 1;
      entry.next[static_cast<std::size_t>(ids[i + context_len])] += 1;
    }
  }

  lm.descriptor_ = BackendDescriptor{std::move(name), BackendKind::reference_ngram,
                                     lm.vocab_.size(), true};
  validate_descriptor(lm.descriptor_);
  return lm;
}

ReferenceLM ReferenceLM::build_from_lines(std::span<const std::string> lines,
                                          int order, double alpha, std::string name) {
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(lines.size());
  for (const auto& line : lines) corpus.push_back(tokenize(line));
  return build(corpus, order, alpha, std::move(name));
}

ReferenceLM ReferenceLM::load_corpus_file(const std::string& path, int order,
                                          double alpha, std::string name) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(line);
  }
  return build_from_lines(lines, order, alpha, std::move(name));
}

std::optional<std::size_t> ReferenceLM::token_id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::int64_t> ReferenceLM::history_key(
    std::span<const std::string> history) const {
  const std::size_t context_len = static_cast<std::size_t>(order_ - 1);
  std::vector<std::int64_t> key(context_len, kBos);
  const std::size_t take = std::min(context_len, history.size());
  const auto tail = history.subspan(history.size() - take);
  for (std::size_t i = 0; i < take; ++i) {
    std::int64_t id = kUnknown;
    if (tail[i] == kBeginSentinel) {
      id = kBos;
    } else if (auto found = token_id(tail[i])) {
      id = static_cast<std::int64_t>(*found);
    }
    key[context_len - take + i] = id;
  }
  return key;
}

const ReferenceLM::HistoryCounts* ReferenceLM::find(
    const std::vector<std::int64_t>& key) const {
  auto it = counts_.find(key);
  return it == counts_.end() ? nullptr : &it->second;
}

std::uint64_t ReferenceLM::history_count(std::span<const std::string> history) const {
  const auto* entry = find(history_key(history));
  return entry ? entry->total : 0;
}

double ReferenceLM::probability(std::span<const std::string> history,
                                std::string_view token) const {
  auto id = token_id(token);
  if (!id) {
    throw BackendError("token '" + std::string(token) +
                       "' is not in the reference vocabulary");
  }
  const auto* entry = find(history_key(history));
  const double denom =
      static_cast<double>(entry ? entry->total : 0) + alpha_ * static_cast<double>(vocab_.size());
  double count = 0.0;
  if (entry) {
    if (auto it = entry->next.find(*id); it != entry->next.end()) {
      count = static_cast<double>(it->second);
    }
  }
  return (count + alpha_) / denom;
}

std::vector<double> ReferenceLM::conditional(std::span<const std::string> history) const {
  const auto* entry = find(history_key(history));
  const double total = entry ? static_cast<double>(entry->total) : 0.0;
  const double denom = total + alpha_ * static_cast<double>(vocab_.size());
  std::vector<double> probs(vocab_.size(), alpha_ / denom);
  if (entry) {
    for (const auto& [id, c] : entry->next) {
      probs[id] = (static_cast<double>(c) + alpha_) / denom;
    }
  }
  return probs;
}

TokenDistribution ReferenceLM::next_distribution(std::string_view context) const {
  const auto tokens = tokenize(context);
  TokenDistribution dist;
  dist.context = std::string(context);
  dist.probabilities = conditional(strip_leading_bos(tokens));
  dist.token_strings = vocab_;
  return dist;
}

ScoredContinuation ReferenceLM::score_continuation(std::string_view context,
                                                   std::string_view continuation) const {
  if (continuation.empty()) throw ValidationError("empty continuation");

  std::string combined;
  combined.reserve(context.size() + continuation.size());
  combined.append(context).append(continuation);
  const auto spans = tokenize_with_offsets(combined);
  const std::size_t boundary = context.size();

  std::size_t first = 0;
  while (first < spans.size() && spans[first].end <= boundary) ++first;
  if (first == spans.size()) {
    throw ValidationError("continuation contains no tokens");
  }

  ScoredContinuation out;
  out.context = std::string(context);
  out.continuation = std::string(continuation);
  out.boundary_merged = spans[first].begin < boundary;

  std::vector<std::string> history;
  bool leading = true;  // every token so far has been a begin sentinel
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& tok = spans[i].text;
    if (i >= first) {
      if (tok == kBeginSentinel) {
        if (!leading) throw BackendError("begin sentinel inside text");
        out.token_logprobs.push_back(0.0);
      } else {
        out.token_logprobs.push_back(std::log(probability(history, tok)));
      }
      std::size_t start = i == first ? std::min(boundary, spans[i].begin) : spans[i - 1].end;
      std::size_t stop = i + 1 == spans.size() ? combined.size() : spans[i].end;
      out.token_texts.push_back(combined.substr(start, stop - start));
    }
    if (tok == kBeginSentinel) {
      if (!leading) throw BackendError("begin sentinel inside text");
      continue;
    }
    leading = false;
    history.push_back(tok);
  }
  return out;
}

nlohmann::json ReferenceLM::info() const {
  auto j = Backend::info();
  j["kind"] = to_string(descriptor_.kind);
  j["order"] = order_;
  j["alpha"] = alpha_;
  return j;
}

}  // namespace animacy

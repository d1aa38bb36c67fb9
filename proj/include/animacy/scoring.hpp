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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "animacy/backend.hpp"
#include "animacy/stimuli.hpp"

namespace animacy {

struct SurprisalRecord {
  std::string stimulus_id;
  Condition condition = Condition::animate;
  std::string span_label;
  double surprisal_bits = 0.0;
  int token_count = 0;
  bool boundary_merged = false;

  bool operator==(const SurprisalRecord&) const = default;
};

struct MinimalPairOutcome {
  std::string pair_id;
  double logprob_good_bits = 0.0;
  double logprob_bad_bits = 0.0;
  bool correct = false;

  bool operator==(const MinimalPairOutcome&) const = default;
};

// Label used for the contextless-baseline record of a context story.
inline constexpr std::string_view kBaselineLabelSuffix = "_baseline";

// -(sum of token log-probabilities) / ln 2.
double surprisal_bits(const ScoredContinuation& scored);

// Base-2 log-probability of a whole sentence. The first token is conditioned
// per the backend's begin-of-sequence policy.
double sentence_logprob_bits(const Backend& backend, std::string_view sentence);

// Correct iff the good sentence is strictly more probable; ties are incorrect.
MinimalPairOutcome eval_minimal_pair(const Backend& backend, const MinimalPairStimulus& pair);
MinimalPairOutcome compare_logprobs(std::string pair_id, double good_bits, double bad_bits);

// Throws ValidationError on an empty list.
double minimal_pair_accuracy(std::span<const MinimalPairOutcome> outcomes);

/// Splits rendered text around a character span into the context (everything
/// before the span, trailing whitespace removed) and the continuation (that
/// whitespace followed by the span text), so "...to the oar" yields
/// ("...to the", " oar").
std::pair<std::string, std::string> split_at_span(std::string_view text, const CharRange& span);

// One record per critical span of `story` in the given condition, in span
// order.
std::vector<SurprisalRecord> story_surprisals(const Backend& backend, const StoryStimulus& story,
                                              Condition condition);

// Surprisal of a story's single critical span given only the condition's
// baseline context. Throws ValidationError if the story has no baseline.
SurprisalRecord baseline_surprisal(const Backend& backend, const StoryStimulus& story,
                                   Condition condition);

}  // namespace animacy

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

#include "animacy/scoring.hpp"

#include <cmath>
#include <numbers>

#include "animacy/error.hpp"

namespace animacy {

double surprisal_bits(const ScoredContinuation& scored) {
  if (scored.token_logprobs.empty()) {
    throw ValidationError("cannot compute surprisal of an empty token list");
  }
  double total = 0.0;
  for (double lp : scored.token_logprobs) total += lp;
  // -0.0 shows up for probability-1 tokens; report it as 0.
  const double bits = -total / std::numbers::ln2;
  return bits == 0.0 ? 0.0 : bits;
}

double sentence_logprob_bits(const Backend& backend, std::string_view sentence) {
  if (sentence.empty()) throw ValidationError("empty sentence");
  return -surprisal_bits(backend.score_continuation("", sentence));
}

MinimalPairOutcome compare_logprobs(std::string pair_id, double good_bits, double bad_bits) {
  return {std::move(pair_id), good_bits, bad_bits, good_bits > bad_bits};
}

MinimalPairOutcome eval_minimal_pair(const Backend& backend, const MinimalPairStimulus& pair) {
  validate_pair(pair);
  return compare_logprobs(pair.pair_id, sentence_logprob_bits(backend, pair.sentence_good),
                          sentence_logprob_bits(backend, pair.sentence_bad));
}

double minimal_pair_accuracy(std::span<const MinimalPairOutcome> outcomes) {
  if (outcomes.empty()) throw ValidationError("accuracy of an empty outcome list");
  std::size_t correct = 0;
  for (const auto& o : outcomes) correct += o.correct ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

std::pair<std::string, std::string> split_at_span(std::string_view text, const CharRange& span) {
  if (span.start >= span.end || span.end > text.size()) {
    throw ValidationError("critical span out of range");
  }
  std::size_t cut = span.start;
  while (cut > 0 && (text[cut - 1] == ' ' || text[cut - 1] == '\t' || text[cut - 1] == '\n')) {
    --cut;
  }
  return {std::string(text.substr(0, cut)), std::string(text.substr(cut, span.end - cut))};
}

namespace {

SurprisalRecord make_record(const StoryStimulus& story, Condition condition, std::string label,
                            const ScoredContinuation& scored) {
  SurprisalRecord r;
  r.stimulus_id = story.story_id;
  r.condition = condition;
  r.span_label = std::move(label);
  r.surprisal_bits = surprisal_bits(scored);
  r.token_count = static_cast<int>(scored.token_logprobs.size());
  r.boundary_merged = scored.boundary_merged;
  return r;
}

}  // namespace

std::vector<SurprisalRecord> story_surprisals(const Backend& backend, const StoryStimulus& story,
                                              Condition condition) {
  validate_story(story);
  const auto& text = story.text(condition);
  std::vector<SurprisalRecord> out;
  out.reserve(story.spans.size());
  for (const auto& span : story.spans) {
    auto [context, continuation] = split_at_span(text, span.range(condition));
    out.push_back(make_record(story, condition, span.label,
                              backend.score_continuation(context, continuation)));
  }
  return out;
}

SurprisalRecord baseline_surprisal(const Backend& backend, const StoryStimulus& story,
                                   Condition condition) {
  const auto& baseline = story.baseline_context(condition);
  if (!baseline) {
    throw ValidationError("story '" + story.story_id + "' has no baseline context for the " +
                          std::string(to_string(condition)) + " condition");
  }
  if (story.spans.size() != 1) {
    throw ValidationError("baseline scoring needs exactly one critical span");
  }
  const auto& span = story.spans.front();
  const auto& r = span.range(condition);
  const std::string word = story.text(condition).substr(r.start, r.end - r.start);
  std::string context = *baseline;
  while (!context.empty() && context.back() == ' ') context.pop_back();
  return make_record(story, condition, span.label + std::string(kBaselineLabelSuffix),
                     backend.score_continuation(context, " " + word));
}

}  // namespace animacy

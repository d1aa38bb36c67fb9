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
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace animacy {

enum class Condition { animate, inanimate };
std::string_view to_string(Condition c);
Condition parse_condition(std::string_view s);

// ---------------------------------------------------------------------------
// Minimal pairs

enum class PairDataset { animate_transitive, animate_passive };
std::string_view to_string(PairDataset d);
PairDataset parse_pair_dataset(std::string_view s);

struct MinimalPairStimulus {
  std::string pair_id;
  std::string sentence_good;
  std::string sentence_bad;
  PairDataset dataset = PairDataset::animate_transitive;

  bool operator==(const MinimalPairStimulus&) const = default;
};

// ---------------------------------------------------------------------------
// Stories

enum class StoryExperiment { repetition, context, adaptation, context_en };
std::string_view to_string(StoryExperiment e);
StoryExperiment parse_story_experiment(std::string_view s);

struct CharRange {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  bool operator==(const CharRange&) const = default;
};

struct CriticalSpan {
  std::string label;
  CharRange animate;
  CharRange inanimate;

  const CharRange& range(Condition c) const {
    return c == Condition::animate ? animate : inanimate;
  }
  bool operator==(const CriticalSpan&) const = default;
};

struct StoryStimulus {
  std::string story_id;
  StoryExperiment experiment = StoryExperiment::repetition;
  std::string text_animate;
  std::string text_inanimate;
  std::vector<CriticalSpan> spans;
  std::optional<std::string> baseline_context_animate;
  std::optional<std::string> baseline_context_inanimate;

  const std::string& text(Condition c) const {
    return c == Condition::animate ? text_animate : text_inanimate;
  }
  const std::optional<std::string>& baseline_context(Condition c) const {
    return c == Condition::animate ? baseline_context_animate : baseline_context_inanimate;
  }
  bool operator==(const StoryStimulus&) const = default;
};

// Span labels each story experiment must carry, in position order.
const std::vector<std::string>& expected_span_labels(StoryExperiment e);

// Throws ValidationError on out-of-range, overlapping, unordered or
// duplicate spans, on missing texts, and on a label set that does not match
// the experiment.
void validate_story(const StoryStimulus& story);
void validate_pair(const MinimalPairStimulus& pair);

// ---------------------------------------------------------------------------
// Low-context items

enum class PromptType { verb_eliciting, adjective_eliciting };
enum class VerbCategory { psychological, physical };
enum class CooccurrenceBand { high, high_mid, mid };
enum class Variant { base, large_pool, freq_matched, cataphoric };

std::string_view to_string(PromptType v);
std::string_view to_string(VerbCategory v);
std::string_view to_string(CooccurrenceBand v);
std::string_view to_string(Variant v);
PromptType parse_prompt_type(std::string_view s);
VerbCategory parse_verb_category(std::string_view s);
CooccurrenceBand parse_band(std::string_view s);
Variant parse_variant(std::string_view s);

struct LowContextItem {
  std::string item_id;
  std::string prompt_template;
  PromptType prompt_type = PromptType::verb_eliciting;
  std::string noun;
  std::string verb;
  VerbCategory verb_category = VerbCategory::physical;
  CooccurrenceBand cooccurrence_band = CooccurrenceBand::high;
  std::string human_entity;
  std::string sentence_O;
  std::string sentence_I;
  std::string sentence_A;
  Variant variant = Variant::base;

  bool operator==(const LowContextItem&) const = default;
};

struct DatasetHeader {
  std::string generator;
  int version = 0;
  std::uint64_t seed = 0;
  Variant variant = Variant::base;
  std::size_t n = 0;
  std::map<std::string, std::string> pool_hashes;

  bool operator==(const DatasetHeader&) const = default;
};

struct LowContextDataset {
  DatasetHeader header;
  std::vector<LowContextItem> items;
};

// ---------------------------------------------------------------------------
// JSON (one object per JSONL line)

nlohmann::ordered_json to_json(const MinimalPairStimulus& p);
nlohmann::ordered_json to_json(const StoryStimulus& s);
nlohmann::ordered_json to_json(const LowContextItem& item);
nlohmann::ordered_json to_json(const DatasetHeader& h);

MinimalPairStimulus pair_from_json(const nlohmann::json& j);
StoryStimulus story_from_json(const nlohmann::json& j);
LowContextItem item_from_json(const nlohmann::json& j);
DatasetHeader header_from_json(const nlohmann::json& j);

std::vector<MinimalPairStimulus> load_minimal_pairs(const std::string& path);
std::vector<StoryStimulus> load_story_stimuli(const std::string& path);
LowContextDataset load_low_context(const std::string& path);

std::string serialize_minimal_pairs(const std::vector<MinimalPairStimulus>& pairs);
std::string serialize_stories(const std::vector<StoryStimulus>& stories);
std::string serialize_low_context(const LowContextDataset& dataset);

// Reads every JSONL line (blank lines skipped); ValidationError on malformed
// JSON with the offending line number.
std::vector<nlohmann::json> read_jsonl(const std::string& path);

}  // namespace animacy

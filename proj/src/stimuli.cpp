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

#include "animacy/stimuli.hpp"

#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "animacy/error.hpp"

namespace animacy {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table,
             std::string_view what) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  throw ValidationError("unknown " + std::string(what) + ": '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view enum_name(E value, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "unknown";
}

constexpr std::array<std::pair<Condition, std::string_view>, 2> kConditions{{
    {Condition::animate, "animate"}, {Condition::inanimate, "inanimate"}}};
constexpr std::array<std::pair<PairDataset, std::string_view>, 2> kPairDatasets{{
    {PairDataset::animate_transitive, "animate_transitive"},
    {PairDataset::animate_passive, "animate_passive"}}};
constexpr std::array<std::pair<StoryExperiment, std::string_view>, 4> kStoryExperiments{{
    {StoryExperiment::repetition, "repetition"},
    {StoryExperiment::context, "context"},
    {StoryExperiment::adaptation, "adaptation"},
    {StoryExperiment::context_en, "context_en"}}};
constexpr std::array<std::pair<PromptType, std::string_view>, 2> kPromptTypes{{
    {PromptType::verb_eliciting, "verb_eliciting"},
    {PromptType::adjective_eliciting, "adjective_eliciting"}}};
constexpr std::array<std::pair<VerbCategory, std::string_view>, 2> kVerbCategories{{
    {VerbCategory::psychological, "psychological"}, {VerbCategory::physical, "physical"}}};
constexpr std::array<std::pair<CooccurrenceBand, std::string_view>, 3> kBands{{
    {CooccurrenceBand::high, "high"},
    {CooccurrenceBand::high_mid, "high_mid"},
    {CooccurrenceBand::mid, "mid"}}};
constexpr std::array<std::pair<Variant, std::string_view>, 4> kVariants{{
    {Variant::base, "base"},
    {Variant::large_pool, "large_pool"},
    {Variant::freq_matched, "freq_matched"},
    {Variant::cataphoric, "cataphoric"}}};

std::string required_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw ValidationError(std::string("missing or non-string field '") + key + "'");
  }
  return it->get<std::string>();
}

std::size_t required_index(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer() || it->get<long long>() < 0) {
    throw ValidationError(std::string("missing or invalid offset '") + key + "'");
  }
  return it->get<std::size_t>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

template <typename T, typename Fn>
std::vector<T> load_lines(const std::string& path, Fn&& convert) {
  const auto rows = read_jsonl(path);
  if (rows.empty()) throw ValidationError("no stimuli in " + path);
  std::vector<T> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      out.push_back(convert(rows[i]));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ": record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

template <typename T, typename IdFn>
void check_unique_ids(const std::vector<T>& items, IdFn&& id, const std::string& path) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    if (!seen.insert(id(item)).second) {
      throw ValidationError(path + ": duplicate id '" + id(item) + "'");
    }
  }
}

}  // namespace

std::string_view to_string(Condition c) { return enum_name(c, kConditions); }
Condition parse_condition(std::string_view s) { return parse_enum(s, kConditions, "condition"); }
std::string_view to_string(PairDataset d) { return enum_name(d, kPairDatasets); }
PairDataset parse_pair_dataset(std::string_view s) {
  return parse_enum(s, kPairDatasets, "minimal-pair dataset");
}
std::string_view to_string(StoryExperiment e) { return enum_name(e, kStoryExperiments); }
StoryExperiment parse_story_experiment(std::string_view s) {
  return parse_enum(s, kStoryExperiments, "story experiment");
}
std::string_view to_string(PromptType v) { return enum_name(v, kPromptTypes); }
std::string_view to_string(VerbCategory v) { return enum_name(v, kVerbCategories); }
std::string_view to_string(CooccurrenceBand v) { return enum_name(v, kBands); }
std::string_view to_string(Variant v) { return enum_name(v, kVariants); }
PromptType parse_prompt_type(std::string_view s) { return parse_enum(s, kPromptTypes, "prompt type"); }
VerbCategory parse_verb_category(std::string_view s) {
  return parse_enum(s, kVerbCategories, "verb category");
}
CooccurrenceBand parse_band(std::string_view s) {
  return parse_enum(s, kBands, "co-occurrence band");
}
Variant parse_variant(std::string_view s) { return parse_enum(s, kVariants, "variant"); }

const std::vector<std::string>& expected_span_labels(StoryExperiment e) {
  static const std::vector<std::string> repetition{"T1", "T3", "T5"};
  static const std::vector<std::string> adaptation{"V1", "V2"};
  static const std::vector<std::string> context{"ADJ"};
  switch (e) {
    case StoryExperiment::repetition:
      return repetition;
    case StoryExperiment::adaptation:
      return adaptation;
    case StoryExperiment::context:
    case StoryExperiment::context_en:
      return context;
  }
  return context;
}

void validate_pair(const MinimalPairStimulus& pair) {
  if (pair.pair_id.empty()) throw ValidationError("empty pair_id");
  if (pair.sentence_good.empty() || pair.sentence_bad.empty()) {
    throw ValidationError("pair '" + pair.pair_id + "' has an empty sentence");
  }
  if (pair.sentence_good == pair.sentence_bad) {
    throw ValidationError("pair '" + pair.pair_id + "' has identical sentences");
  }
}

void validate_story(const StoryStimulus& story) {
  const std::string where = "story '" + story.story_id + "'";
  if (story.story_id.empty()) throw ValidationError("empty story_id");
  if (story.text_animate.empty()) throw ValidationError(where + ": missing text_animate");
  if (story.text_inanimate.empty()) throw ValidationError(where + ": missing text_inanimate");

  std::set<std::string> labels;
  for (const auto& span : story.spans) {
    if (!labels.insert(span.label).second) {
      throw ValidationError(where + ": duplicate span label " + span.label);
    }
  }
  for (Condition c : {Condition::animate, Condition::inanimate}) {
    const auto& text = story.text(c);
    std::size_t previous_end = 0;
    for (const auto& span : story.spans) {
      const auto& r = span.range(c);
      if (r.start >= r.end || r.end > text.size()) {
        throw ValidationError(where + ": span " + span.label + " out of range in " +
                              std::string(to_string(c)) + " text");
      }
      if (r.start < previous_end) {
        throw ValidationError(where + ": span " + span.label +
                              " overlaps or precedes the previous span");
      }
      previous_end = r.end;
    }
  }
  std::vector<std::string> order;
  for (const auto& span : story.spans) order.push_back(span.label);
  const auto& expected = expected_span_labels(story.experiment);
  if (order != expected) {
    std::string want;
    for (const auto& l : expected) want += (want.empty() ? "" : ",") + l;
    throw ValidationError(where + ": " + std::string(to_string(story.experiment)) +
                          " stories need span labels {" + want + "} in order");
  }
}

ordered_json to_json(const MinimalPairStimulus& p) {
  return {{"pair_id", p.pair_id},
          {"sentence_good", p.sentence_good},
          {"sentence_bad", p.sentence_bad},
          {"dataset", to_string(p.dataset)}};
}

MinimalPairStimulus pair_from_json(const json& j) {
  MinimalPairStimulus p;
  // Upstream BLiMP files carry "pairID" and "UID" instead.
  if (j.contains("pair_id")) {
    p.pair_id = required_string(j, "pair_id");
  } else if (auto it = j.find("pairID"); it != j.end() && (it->is_string() || it->is_number_integer())) {
    p.pair_id = it->is_string() ? it->get<std::string>() : std::to_string(it->get<long long>());
  } else {
    throw ValidationError("missing or non-string field 'pair_id'");
  }
  p.sentence_good = required_string(j, "sentence_good");
  p.sentence_bad = required_string(j, "sentence_bad");
  if (j.contains("dataset")) {
    p.dataset = parse_pair_dataset(required_string(j, "dataset"));
  } else {
    const auto uid = required_string(j, "UID");
    if (uid == "animate_subject_trans") {
      p.dataset = PairDataset::animate_transitive;
    } else if (uid == "animate_subject_passive") {
      p.dataset = PairDataset::animate_passive;
    } else {
      throw ValidationError("unknown BLiMP UID '" + uid + "'");
    }
  }
  validate_pair(p);
  return p;
}

ordered_json to_json(const StoryStimulus& s) {
  ordered_json spans = ordered_json::array();
  for (const auto& span : s.spans) {
    spans.push_back({{"label", span.label},
                     {"start_animate", span.animate.start},
                     {"end_animate", span.animate.end},
                     {"start_inanimate", span.inanimate.start},
                     {"end_inanimate", span.inanimate.end}});
  }
  ordered_json j = {{"story_id", s.story_id},
                    {"experiment", to_string(s.experiment)},
                    {"text_animate", s.text_animate},
                    {"text_inanimate", s.text_inanimate},
                    {"spans", std::move(spans)}};
  if (s.baseline_context_animate) j["baseline_context_animate"] = *s.baseline_context_animate;
  if (s.baseline_context_inanimate) {
    j["baseline_context_inanimate"] = *s.baseline_context_inanimate;
  }
  return j;
}

StoryStimulus story_from_json(const json& j) {
  StoryStimulus s;
  s.story_id = required_string(j, "story_id");
  s.experiment = parse_story_experiment(required_string(j, "experiment"));
  s.text_animate = required_string(j, "text_animate");
  s.text_inanimate = required_string(j, "text_inanimate");
  auto spans = j.find("spans");
  if (spans == j.end() || !spans->is_array()) throw ValidationError("missing 'spans' array");
  for (const auto& sj : *spans) {
    CriticalSpan span;
    span.label = required_string(sj, "label");
    span.animate = {required_index(sj, "start_animate"), required_index(sj, "end_animate")};
    span.inanimate = {required_index(sj, "start_inanimate"), required_index(sj, "end_inanimate")};
    s.spans.push_back(std::move(span));
  }
  s.baseline_context_animate = optional_string(j, "baseline_context_animate");
  s.baseline_context_inanimate = optional_string(j, "baseline_context_inanimate");
  validate_story(s);
  return s;
}

ordered_json to_json(const LowContextItem& item) {
  return {{"item_id", item.item_id},
          {"prompt_template", item.prompt_template},
          {"prompt_type", to_string(item.prompt_type)},
          {"noun", item.noun},
          {"verb", item.verb},
          {"verb_category", to_string(item.verb_category)},
          {"cooccurrence_band", to_string(item.cooccurrence_band)},
          {"human_entity", item.human_entity},
          {"sentence_O", item.sentence_O},
          {"sentence_I", item.sentence_I},
          {"sentence_A", item.sentence_A},
          {"variant", to_string(item.variant)}};
}

LowContextItem item_from_json(const json& j) {
  LowContextItem item;
  item.item_id = required_string(j, "item_id");
  item.prompt_template = required_string(j, "prompt_template");
  item.prompt_type = parse_prompt_type(required_string(j, "prompt_type"));
  item.noun = required_string(j, "noun");
  item.verb = required_string(j, "verb");
  item.verb_category = parse_verb_category(required_string(j, "verb_category"));
  item.cooccurrence_band = parse_band(required_string(j, "cooccurrence_band"));
  item.human_entity = required_string(j, "human_entity");
  item.sentence_O = required_string(j, "sentence_O");
  item.sentence_I = required_string(j, "sentence_I");
  item.sentence_A = required_string(j, "sentence_A");
  item.variant = parse_variant(required_string(j, "variant"));
  return item;
}

ordered_json to_json(const DatasetHeader& h) {
  ordered_json hashes = ordered_json::object();
  for (const auto& [k, v] : h.pool_hashes) hashes[k] = v;
  return {{"generator", h.generator},
          {"version", h.version},
          {"seed", h.seed},
          {"variant", to_string(h.variant)},
          {"n", h.n},
          {"pool_hashes", std::move(hashes)}};
}

DatasetHeader header_from_json(const json& j) {
  DatasetHeader h;
  h.generator = required_string(j, "generator");
  try {
    h.version = j.at("version").get<int>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.n = j.at("n").get<std::size_t>();
    h.variant = parse_variant(required_string(j, "variant"));
    for (const auto& [k, v] : j.at("pool_hashes").items()) h.pool_hashes[k] = v.get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed dataset header: ") + e.what());
  }
  return h;
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::vector<json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": malformed JSON: " + e.what());
    }
    if (!rows.back().is_object()) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected a JSON object");
    }
  }
  return rows;
}

std::vector<MinimalPairStimulus> load_minimal_pairs(const std::string& path) {
  auto pairs = load_lines<MinimalPairStimulus>(path, pair_from_json);
  check_unique_ids(pairs, [](const auto& p) { return p.pair_id; }, path);
  return pairs;
}

std::vector<StoryStimulus> load_story_stimuli(const std::string& path) {
  auto stories = load_lines<StoryStimulus>(path, story_from_json);
  check_unique_ids(stories, [](const auto& s) { return s.story_id; }, path);
  return stories;
}

LowContextDataset load_low_context(const std::string& path) {
  auto rows = read_jsonl(path);
  if (rows.empty()) throw ValidationError("no stimuli in " + path);
  LowContextDataset ds;
  ds.header = header_from_json(rows.front());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    try {
      ds.items.push_back(item_from_json(rows[i]));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ": item " + std::to_string(i) + ": " + e.what());
    }
  }
  if (ds.items.empty()) throw ValidationError("no stimuli in " + path);
  if (ds.items.size() != ds.header.n) {
    throw ValidationError(path + ": header declares " + std::to_string(ds.header.n) +
                          " items, file has " + std::to_string(ds.items.size()));
  }
  check_unique_ids(ds.items, [](const auto& it) { return it.item_id; }, path);
  return ds;
}

namespace {
template <typename T>
std::string serialize_all(const std::vector<T>& items) {
  std::string out;
  for (const auto& item : items) out += to_json(item).dump() + "\n";
  return out;
}
}  // namespace

std::string serialize_minimal_pairs(const std::vector<MinimalPairStimulus>& pairs) {
  return serialize_all(pairs);
}

std::string serialize_stories(const std::vector<StoryStimulus>& stories) {
  return serialize_all(stories);
}

std::string serialize_low_context(const LowContextDataset& dataset) {
  return to_json(dataset.header).dump() + "\n" + serialize_all(dataset.items);
}

}  // namespace animacy

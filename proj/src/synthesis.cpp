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

#include "animacy/synthesis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "animacy/digest.hpp"
#include "animacy/error.hpp"

namespace animacy {
namespace {

constexpr std::string_view kNounSlot = "[noun]";
constexpr std::string_view kVerbSlot = "[verb]";
constexpr std::string_view kClause = "[noun] [verb] and ";

std::vector<std::vector<std::string>> read_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    rows.push_back(std::move(cols));
  }
  return rows;
}

std::optional<double> optional_number(const std::vector<std::string>& cols, std::size_t i,
                                      const std::string& where) {
  if (i >= cols.size() || cols[i].empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    double v = std::stod(cols[i], &used);
    if (used != cols[i].size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError(where + ": invalid rating '" + cols[i] + "'");
  }
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string item_id(std::size_t index, std::size_t n) {
  std::size_t width = 5;
  for (std::size_t v = n; v >= 100000; v /= 10) ++width;
  std::string digits = std::to_string(index);
  return "lc-" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

void check_size(std::size_t got, std::size_t want, const std::string& what) {
  if (got != want) {
    throw ValidationError(what + " pool has " + std::to_string(got) + " entries, expected " +
                          std::to_string(want));
  }
}

}  // namespace

std::vector<NounEntry> load_nouns(const std::string& path) {
  std::vector<NounEntry> out;
  for (const auto& cols : read_tsv(path)) {
    if (cols[0].empty()) throw ValidationError(path + ": empty noun");
    out.push_back({cols[0], optional_number(cols, 1, path), optional_number(cols, 2, path)});
  }
  if (out.empty()) throw ValidationError(path + ": empty noun pool");
  return out;
}

std::vector<VerbEntry> load_verbs(const std::string& path) {
  std::vector<VerbEntry> out;
  for (const auto& cols : read_tsv(path)) {
    if (cols.size() < 3 || cols[0].empty()) {
      throw ValidationError(path + ": verb rows need verb, category and band");
    }
    out.push_back({cols[0], parse_verb_category(cols[1]), parse_band(cols[2])});
  }
  if (out.empty()) throw ValidationError(path + ": empty verb pool");
  return out;
}

std::vector<std::string> load_word_list(const std::string& path) {
  std::vector<std::string> out;
  for (const auto& cols : read_tsv(path)) {
    if (!cols[0].empty()) out.push_back(cols[0]);
  }
  if (out.empty()) throw ValidationError(path + ": empty list");
  return out;
}

PoolSet load_standard_pools(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  PoolSet pools;
  pools.nouns = load_nouns((root / "nouns.tsv").string());
  pools.verbs = load_verbs((root / "verbs.tsv").string());
  pools.templates = load_word_list((root / "templates.txt").string());
  pools.humans_base = load_word_list((root / "humans_base.txt").string());
  pools.humans_large = load_word_list((root / "humans_large.txt").string());
  if (fs::exists(root / "human_candidates.txt")) {
    pools.human_candidates = load_word_list((root / "human_candidates.txt").string());
  }
  check_size(pools.nouns.size(), kNounPoolSize, "noun");
  check_size(pools.verbs.size(), kVerbPoolSize, "verb");
  check_size(pools.templates.size(), kTemplateCount, "template");
  check_size(pools.humans_base.size(), kBaseHumanPoolSize, "base human");
  check_size(pools.humans_large.size(), kLargeHumanPoolSize, "large human");
  return pools;
}

std::map<std::string, std::string> pool_hashes(const std::vector<NounEntry>& nouns,
                                               const std::vector<VerbEntry>& verbs,
                                               const std::vector<std::string>& templates,
                                               const std::vector<std::string>& humans) {
  std::string n, v, t, h;
  for (const auto& e : nouns) n += e.noun + "\n";
  for (const auto& e : verbs) {
    v += e.verb + "\t" + std::string(to_string(e.category)) + "\t" +
         std::string(to_string(e.cooccurrence_band)) + "\n";
  }
  for (const auto& e : templates) t += e + "\n";
  for (const auto& e : humans) h += e + "\n";
  return {{"nouns", sha256_hex(n)},
          {"verbs", sha256_hex(v)},
          {"templates", sha256_hex(t)},
          {"humans", sha256_hex(h)}};
}

PromptType classify_template(std::string_view prompt_template) {
  std::string_view s = prompt_template;
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s.ends_with(" to") ? PromptType::verb_eliciting : PromptType::adjective_eliciting;
}

RenderedItem render_item(std::string_view prompt_template, std::string_view noun,
                         std::string_view verb, std::string_view human, Variant variant) {
  const auto clause = prompt_template.find(kClause);
  if (clause == std::string_view::npos ||
      prompt_template.find(kNounSlot, clause + 1) != std::string_view::npos ||
      prompt_template.find(kVerbSlot, clause + kClause.size()) != std::string_view::npos) {
    throw ValidationError("template '" + std::string(prompt_template) +
                          "' does not admit the verb-clause removal rule");
  }
  const std::string prefix(prompt_template.substr(0, clause));
  const std::string tail(prompt_template.substr(clause + kClause.size()));

  RenderedItem out;
  if (variant == Variant::cataphoric) {
    std::string lowered = prefix;
    if (!lowered.empty() && lowered[0] >= 'A' && lowered[0] <= 'Z') {
      lowered[0] = static_cast<char>(lowered[0] - 'A' + 'a');
    }
    out.sentence_O = "After it " + std::string(verb) + ", " + lowered + std::string(noun) + " " + tail;
  } else {
    out.sentence_O = prefix + std::string(noun) + " " + std::string(verb) + " and " + tail;
  }
  out.sentence_I = prefix + std::string(noun) + " " + tail;
  out.sentence_A = prefix + std::string(human) + " " + tail;
  return out;
}

References construct_references(const LowContextItem& item) {
  auto r = render_item(item.prompt_template, item.noun, item.verb, item.human_entity, item.variant);
  return {std::move(r.sentence_I), std::move(r.sentence_A)};
}

void validate_item(const LowContextItem& item) {
  const auto r =
      render_item(item.prompt_template, item.noun, item.verb, item.human_entity, item.variant);
  if (r.sentence_O != item.sentence_O || r.sentence_I != item.sentence_I ||
      r.sentence_A != item.sentence_A) {
    throw ValidationError("item '" + item.item_id +
                          "' does not match its re-derived O/I/A sentences");
  }
  if (item.sentence_O.find(item.noun) == std::string::npos ||
      item.sentence_O.find(item.verb) == std::string::npos) {
    throw ValidationError("item '" + item.item_id + "': O must contain noun and verb");
  }
  if (classify_template(item.prompt_template) != item.prompt_type) {
    throw ValidationError("item '" + item.item_id + "': prompt_type does not match template");
  }
}

std::uint64_t DeterministicSampler::index(std::uint64_t bound) {
  if (bound == 0) throw ValidationError("sampling from an empty pool");
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  // 2^64 mod bound; the top `rem` engine outputs would bias the modulo.
  const std::uint64_t rem = (kMax % bound + 1) % bound;
  std::uint64_t x = engine_();
  if (rem != 0) {
    while (x > kMax - rem) x = engine_();
  }
  return x % bound;
}

LowContextDataset synthesize_low_context(const std::vector<NounEntry>& nouns,
                                         const std::vector<VerbEntry>& verbs,
                                         const std::vector<std::string>& templates,
                                         const std::vector<std::string>& human_pool,
                                         const SynthesisRequest& request,
                                         const std::map<std::string, std::string>* matched_humans) {
  if (request.n == 0) throw ValidationError("dataset size must be positive");
  if (verbs.empty()) throw ValidationError("empty verb pool");
  if (templates.empty()) throw ValidationError("empty template pool");

  const bool matched = request.variant == Variant::freq_matched;
  std::vector<NounEntry> noun_pool;
  std::vector<std::string> hash_humans;
  if (matched) {
    if (matched_humans == nullptr || matched_humans->empty()) {
      throw ValidationError("freq_matched variant needs a noun -> human matching");
    }
    for (const auto& n : nouns) {
      if (auto it = matched_humans->find(n.noun); it != matched_humans->end()) {
        noun_pool.push_back(n);
        hash_humans.push_back(n.noun + "=" + it->second);
      }
    }
  } else {
    noun_pool = nouns;
    hash_humans = human_pool;
    if (human_pool.empty()) throw ValidationError("empty human pool");
  }
  if (noun_pool.empty()) throw ValidationError("empty noun pool");

  // Templates are validated up front so that a bad pool fails before sampling.
  std::vector<PromptType> prompt_types;
  for (const auto& t : templates) {
    render_item(t, "x", "y", "z", request.variant);
    prompt_types.push_back(classify_template(t));
  }

  LowContextDataset ds;
  ds.header.generator = std::string(DeterministicSampler::kName);
  ds.header.version = DeterministicSampler::kVersion;
  ds.header.seed = request.seed;
  ds.header.variant = request.variant;
  ds.header.n = request.n;
  ds.header.pool_hashes = pool_hashes(noun_pool, verbs, templates, hash_humans);

  DeterministicSampler sampler(request.seed);
  ds.items.reserve(request.n);
  for (std::size_t i = 0; i < request.n; ++i) {
    const auto t = sampler.index(templates.size());
    const auto& noun = noun_pool[sampler.index(noun_pool.size())];
    const auto& verb = verbs[sampler.index(verbs.size())];
    const std::string human =
        matched ? matched_humans->at(noun.noun) : human_pool[sampler.index(human_pool.size())];

    LowContextItem item;
    item.item_id = item_id(i, request.n);
    item.prompt_template = templates[t];
    item.prompt_type = prompt_types[t];
    item.noun = noun.noun;
    item.verb = verb.verb;
    item.verb_category = verb.category;
    item.cooccurrence_band = verb.cooccurrence_band;
    item.human_entity = human;
    item.variant = request.variant;
    auto rendered = render_item(item.prompt_template, item.noun, item.verb, human, request.variant);
    item.sentence_O = std::move(rendered.sentence_O);
    item.sentence_I = std::move(rendered.sentence_I);
    item.sentence_A = std::move(rendered.sentence_A);
    ds.items.push_back(std::move(item));
  }
  return ds;
}

std::optional<std::uint64_t> FrequencyTable::lookup(std::string_view word) const {
  auto it = counts.find(lowercase(word));
  if (it == counts.end()) return std::nullopt;
  return it->second;
}

FrequencyTable parse_frequency_table(std::string_view text, std::string source) {
  FrequencyTable table;
  table.source = std::move(source);
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    const std::string where = table.source + ":" + std::to_string(lineno);
    if (tab == std::string_view::npos || tab == 0) {
      throw ValidationError(where + ": expected 'word<TAB>count'");
    }
    const auto count_text = line.substr(tab + 1);
    std::uint64_t count = 0;
    auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc{} || ptr != count_text.data() + count_text.size() || count_text.empty()) {
      throw ValidationError(where + ": non-integer count '" + std::string(count_text) + "'");
    }
    table.counts[lowercase(line.substr(0, tab))] += count;
  }
  if (table.counts.empty()) throw ValidationError(table.source + ": empty frequency table");
  return table;
}

FrequencyTable load_frequency_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_frequency_table(buf.str(), path);
}

FrequencyMatch match_frequencies(const std::vector<std::string>& inanimate_nouns,
                                 const std::vector<std::string>& human_candidates,
                                 const FrequencyTable& table,
                                 const std::set<std::string>& exclude) {
  FrequencyMatch out;
  std::vector<std::pair<std::string, std::uint64_t>> nouns;
  for (const auto& noun : inanimate_nouns) {
    auto f = table.lookup(noun);
    if (exclude.contains(noun) || !f || *f == 0) {
      out.excluded.push_back(noun);
      continue;
    }
    nouns.emplace_back(noun, *f);
  }
  std::vector<std::pair<std::string, std::uint64_t>> candidates;
  for (const auto& c : human_candidates) {
    auto f = table.lookup(c);
    if (!f || *f == 0) {
      out.missing_candidates.push_back(c);
      continue;
    }
    candidates.emplace_back(c, *f);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (candidates.size() < nouns.size()) {
    throw ValidationError("frequency matching needs at least " + std::to_string(nouns.size()) +
                          " usable human candidates, have " + std::to_string(candidates.size()));
  }
  std::sort(nouns.begin(), nouns.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  std::vector<bool> used(candidates.size(), false);
  out.min_ratio = std::numeric_limits<double>::infinity();
  out.max_ratio = 0.0;
  for (const auto& [noun, fn] : nouns) {
    std::size_t best = candidates.size();
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      const double gap = std::abs(std::log(static_cast<double>(fn)) -
                                  std::log(static_cast<double>(candidates[i].second)));
      if (gap < best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    used[best] = true;
    const double ratio = static_cast<double>(fn) / static_cast<double>(candidates[best].second);
    out.assignment[noun] = candidates[best].first;
    out.ratio[noun] = ratio;
    out.min_ratio = std::min(out.min_ratio, ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  if (nouns.empty()) out.min_ratio = 0.0;
  return out;
}

}  // namespace animacy

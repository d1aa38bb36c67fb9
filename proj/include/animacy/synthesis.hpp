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

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "animacy/stimuli.hpp"

namespace animacy {

struct NounEntry {
  std::string noun;
  std::optional<double> animacy_rating;
  std::optional<double> concreteness_rating;
};

struct VerbEntry {
  std::string verb;  // past tense, as rendered into prompts
  VerbCategory category = VerbCategory::physical;
  CooccurrenceBand cooccurrence_band = CooccurrenceBand::high;
};

inline constexpr std::size_t kNounPoolSize = 181;
inline constexpr std::size_t kVerbPoolSize = 191;
inline constexpr std::size_t kTemplateCount = 4;
inline constexpr std::size_t kBaseHumanPoolSize = 6;
inline constexpr std::size_t kLargeHumanPoolSize = 100;
inline constexpr std::size_t kDatasetSize = 10000;

// Plain-data pool readers. Lines starting with '#' and blank lines are
// ignored. Columns are tab separated.
std::vector<NounEntry> load_nouns(const std::string& path);     // noun[\tanimacy[\tconcreteness]]
std::vector<VerbEntry> load_verbs(const std::string& path);     // verb\tcategory\tband
std::vector<std::string> load_word_list(const std::string& path);  // one entry per line

/// The pool set shipped under data/pools/.
struct PoolSet {
  std::vector<NounEntry> nouns;
  std::vector<VerbEntry> verbs;
  std::vector<std::string> templates;
  std::vector<std::string> humans_base;
  std::vector<std::string> humans_large;
  std::vector<std::string> human_candidates;
};

// Loads nouns.tsv, verbs.tsv, templates.txt, humans_base.txt,
// humans_large.txt and (if present) human_candidates.txt from `dir`,
// asserting the 181 / 191 / 4 / 6 / 100 cardinalities.
PoolSet load_standard_pools(const std::string& dir);

// Hex SHA-256 over a canonical rendering of each pool (independent of line
// endings and comments).
std::map<std::string, std::string> pool_hashes(const std::vector<NounEntry>& nouns,
                                               const std::vector<VerbEntry>& verbs,
                                               const std::vector<std::string>& templates,
                                               const std::vector<std::string>& humans);

// "... and began to" elicits a verb; "... and was very" an adjective.
PromptType classify_template(std::string_view prompt_template);

struct RenderedItem {
  std::string sentence_O;
  std::string sentence_I;
  std::string sentence_A;
};

/// Renders O and derives the I / A references.
///
/// The template must read "<Article> [noun] [verb] and <tail>".
///   O (base)        "The chair spoke and began to"
///   O (cataphoric)  "After it spoke, the chair began to"
///   I               "The chair began to"     (verb clause removed)
///   A               "The person began to"    (I with the noun replaced)
///
/// Throws ValidationError when the template does not admit the removal rule.
RenderedItem render_item(std::string_view prompt_template, std::string_view noun,
                         std::string_view verb, std::string_view human, Variant variant);

struct References {
  std::string sentence_I;
  std::string sentence_A;
};

// Re-derives I and A from an item's template fields.
References construct_references(const LowContextItem& item);

// Checks the O/I/A invariants of a stored item by re-derivation.
void validate_item(const LowContextItem& item);

/// Seeded generator with a platform-independent bounded draw.
///
/// std::mt19937_64 output is fixed by the standard; bounded integers use
/// modulo with rejection of the biased tail, so the stream is identical on
/// every conforming implementation.
class DeterministicSampler {
 public:
  static constexpr std::string_view kName = "mt19937_64/rejection";
  static constexpr int kVersion = 1;

  explicit DeterministicSampler(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t index(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

struct SynthesisRequest {
  std::size_t n = kDatasetSize;
  std::uint64_t seed = 0;
  Variant variant = Variant::base;
};

/// Samples n items uniformly with replacement over (template, noun, verb)
/// and over `human_pool`. For Variant::freq_matched, `matched_humans` fixes
/// the human per noun and only matched nouns are sampled.
LowContextDataset synthesize_low_context(
    const std::vector<NounEntry>& nouns, const std::vector<VerbEntry>& verbs,
    const std::vector<std::string>& templates, const std::vector<std::string>& human_pool,
    const SynthesisRequest& request,
    const std::map<std::string, std::string>* matched_humans = nullptr);

// ---------------------------------------------------------------------------
// Frequency matching

struct FrequencyTable {
  std::map<std::string, std::uint64_t> counts;  // keys lowercased
  std::string source;

  std::optional<std::uint64_t> lookup(std::string_view word) const;
};

// TSV "word<TAB>count"; duplicate words are summed.
FrequencyTable load_frequency_table(const std::string& path);
FrequencyTable parse_frequency_table(std::string_view text, std::string source);

struct FrequencyMatch {
  std::map<std::string, std::string> assignment;  // noun -> human
  std::map<std::string, double> ratio;            // noun -> freq(noun)/freq(human)
  std::vector<std::string> excluded;              // flagged or absent from the table
  std::vector<std::string> missing_candidates;    // candidates absent from the table
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

/// Greedy one-to-one matching: nouns in descending frequency (ties by name)
/// each take the unused candidate minimizing |log(freq_noun / freq_human)|
/// (ties by candidate name). Nouns in `exclude` or absent from the table are
/// excluded and reported. Throws ValidationError when fewer usable
/// candidates than nouns remain.
FrequencyMatch match_frequencies(const std::vector<std::string>& inanimate_nouns,
                                 const std::vector<std::string>& human_candidates,
                                 const FrequencyTable& table,
                                 const std::set<std::string>& exclude = {"well"});

}  // namespace animacy

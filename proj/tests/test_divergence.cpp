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

#include <cmath>
#include <map>
#include <random>

#include "animacy/divergence.hpp"
#include "animacy/error.hpp"
#include "animacy/reference_lm.hpp"
#include "animacy/synthesis.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace animacy;

namespace {

// Serves fixed distributions keyed by context and counts lookups.
class TableBackend final : public Backend {
 public:
  explicit TableBackend(std::map<std::string, std::vector<double>> table)
      : table_(std::move(table)) {
    desc_ = {"table", BackendKind::reference_ngram, table_.begin()->second.size(), false};
  }
  const BackendDescriptor& descriptor() const override { return desc_; }
  TokenDistribution next_distribution(std::string_view context) const override {
    ++calls;
    return {std::string(context), table_.at(std::string(context)), {}};
  }
  ScoredContinuation score_continuation(std::string_view, std::string_view) const override {
    throw BackendError("not supported");
  }
  mutable int calls = 0;

 private:
  BackendDescriptor desc_;
  std::map<std::string, std::vector<double>> table_;
};

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double total = 0;
  for (auto& v : p) total += (v = e(rng) + 1e-6);
  for (auto& v : p) v /= total;
  return p;
}

LowContextItem chair_item() {
  LowContextItem item;
  item.item_id = "lc-00000";
  item.prompt_template = "The [noun] [verb] and began to";
  item.noun = "chair";
  item.verb = "spoke";
  item.human_entity = "person";
  const auto r = render_item(item.prompt_template, item.noun, item.verb, item.human_entity,
                             Variant::base);
  item.sentence_O = r.sentence_O;
  item.sentence_I = r.sentence_I;
  item.sentence_A = r.sentence_A;
  return item;
}

}  // namespace

TEST_SUITE("divergence") {

TEST_CASE("KL worked example") {
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75};
  const double expected = 0.5 * std::log2(2.0) + 0.5 * std::log2(2.0 / 3.0);
  CHECK(std::abs(kl_bits(p, q) - expected) <= 1e-15);
  CHECK(kl_bits(p, p) == 0.0);
}

TEST_CASE("KL properties on random distributions") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng() % 60);
    const auto p = random_simplex(rng, n);
    const auto q = random_simplex(rng, n);
    const double d = kl_bits(p, q);
    CHECK(d >= 0.0);
    CHECK(std::abs(d - oracle::kl_direct(p, q)) <= 1e-12 * std::max(1.0, d));
    CHECK(kl_bits(p, p) <= 1e-15);
  }
}

TEST_CASE("KL rejects zeros and mismatched supports") {
  const std::vector<double> p{0.5, 0.5}, z{1.0, 0.0}, three{0.2, 0.3, 0.5};
  CHECK_THROWS_AS(kl_bits(p, z), ValidationError);
  CHECK_THROWS_AS(kl_bits(z, p), ValidationError);
  CHECK_THROWS_AS(kl_bits(p, three), ValidationError);
  const std::vector<double> empty;
  CHECK_THROWS_AS(kl_bits(empty, empty), ValidationError);

  TokenDistribution a{"", {0.5, 0.5}, {"x", "y"}};
  TokenDistribution b{"", {0.5, 0.5}, {"x", "z"}};
  CHECK_THROWS_AS(kl_bits(a, b), ValidationError);
  b.token_strings.clear();
  CHECK(kl_bits(a, b) == 0.0);
}

TEST_CASE("animacy divergences match direct KL of the three distributions") {
  std::mt19937_64 rng(99);
  const auto item = chair_item();
  const auto pO = random_simplex(rng, 8), pI = random_simplex(rng, 8), pA = random_simplex(rng, 8);
  TableBackend backend({{item.sentence_O, pO}, {item.sentence_I, pI}, {item.sentence_A, pA}});
  const auto rec = animacy_divergences(backend, item);
  CHECK(rec.item_id == "lc-00000");
  CHECK(rec.human_entity_used == "person");
  CHECK(std::abs(rec.d_AO_bits - oracle::kl_direct(pA, pO)) <= 1e-12);
  CHECK(std::abs(rec.d_IO_bits - oracle::kl_direct(pI, pO)) <= 1e-12);
  CHECK(std::abs(rec.d_AI_bits - oracle::kl_direct(pA, pI)) <= 1e-12);
  CHECK(backend.calls == 3);
}

TEST_CASE("degenerate item with identical sentences has zero divergence") {
  auto item = chair_item();
  item.sentence_I = item.sentence_O;
  item.sentence_A = item.sentence_O;
  std::mt19937_64 rng(3);
  TableBackend backend({{item.sentence_O, random_simplex(rng, 5)}});
  const auto rec = animacy_divergences(backend, item);
  CHECK(rec.d_AO_bits == 0.0);
  CHECK(rec.d_IO_bits == 0.0);
  CHECK(rec.d_AI_bits == 0.0);
}

TEST_CASE("divergences through the reference model") {
  const std::vector<std::string> corpus{"The chair spoke and began to creak .",
                                        "The person began to speak .", "The chair began to wobble ."};
  const auto lm = ReferenceLM::build_from_lines(corpus, 4, 0.5);
  const auto item = chair_item();
  const auto rec = animacy_divergences(lm, item);
  const auto pO = lm.next_distribution(item.sentence_O).probabilities;
  const auto pA = lm.next_distribution(item.sentence_A).probabilities;
  CHECK(std::abs(rec.d_AO_bits - oracle::kl_direct(pA, pO)) <= 1e-12);
  CHECK(rec.d_AO_bits > 0.0);
}

TEST_CASE("ranking is ascending with id tie-break") {
  std::vector<DivergenceRecord> recs{{"c", 2.0, 0, 0, "x"}, {"b", 1.0, 0, 0, "x"},
                                     {"a", 2.0, 0, 0, "x"}, {"d", 0.5, 0, 0, "x"}};
  const auto ranked = rank_by_animacy_divergence(recs);
  std::vector<std::string> ids;
  for (const auto& r : ranked) ids.push_back(r.item_id);
  CHECK(ids == std::vector<std::string>{"d", "b", "a", "c"});
}

TEST_CASE("top-k continuations") {
  TokenDistribution d{"ctx", {0.1, 0.4, 0.1, 0.4}, {"w", "x", "y", "z"}};
  const auto top = top_k(d, 3);
  CHECK(top.context == "ctx");
  REQUIRE(top.entries.size() == 3);
  CHECK(top.entries[0].first == "x");
  CHECK(top.entries[1].first == "z");
  CHECK(top.entries[2].first == "w");
  CHECK(top.entries[0].second == 0.4);
  CHECK_THROWS_AS(top_k(d, 0), ValidationError);
  CHECK_THROWS_AS(top_k(d, 5), ValidationError);

  const std::vector<std::string> lines{"a b </s>", "a c </s>", "a b </s>"};
  const auto lm = ReferenceLM::build_from_lines(lines, 2, 1.0);
  const auto lm_top = top_k_continuations(lm, "a", 2);
  CHECK(lm_top.entries[0].first == "b");
  CHECK(lm_top.entries[1].first == "c");
}

}  // TEST_SUITE

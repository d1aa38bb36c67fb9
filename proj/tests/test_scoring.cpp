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

#include "animacy/error.hpp"
#include "animacy/reference_lm.hpp"
#include "animacy/scoring.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace animacy;

namespace {

const std::vector<std::string> kCorpus{
    "the sailor held on to the oar .",     "the sailor sang to the oar .",
    "the peanut was in love .",            "the peanut was salted .",
    "Naomi had cleaned a fork .",          "the fork had cleaned Naomi .",
    "Naomi had cleaned a plate .",         "a fork was cleaned by Naomi .",
};

ReferenceLM corpus_lm(int order) { return ReferenceLM::build_from_lines(kCorpus, order, 0.5); }

StoryStimulus oar_story() {
  StoryStimulus s;
  s.story_id = "r1";
  s.experiment = StoryExperiment::context;
  s.text_animate = "the sailor sang to the oar .";
  s.text_inanimate = "the sailor held on to the oar .";
  const auto a = s.text_animate.find("oar");
  const auto i = s.text_inanimate.find("oar");
  s.spans.push_back({"ADJ", {a, a + 3}, {i, i + 3}});
  s.baseline_context_animate = "the";
  s.baseline_context_inanimate = "the";
  return s;
}

}  // namespace

TEST_SUITE("scoring") {

TEST_CASE("surprisal is negative log2 of the summed token log-probabilities") {
  ScoredContinuation sc{"x", " y z", {std::log(0.5), std::log(0.25)}, {" y", " z"}, false};
  CHECK(surprisal_bits(sc) == doctest::Approx(3.0).epsilon(1e-15));
  ScoredContinuation certain{"x", " y", {0.0}, {" y"}, false};
  CHECK(surprisal_bits(certain) == 0.0);
  CHECK_FALSE(std::signbit(surprisal_bits(certain)));
}

TEST_CASE("split_at_span keeps the separating space on the continuation") {
  const std::string text = "He held on to the oar";
  const auto start = text.find("oar");
  const auto [ctx, cont] = split_at_span(text, {start, start + 3});
  CHECK(ctx == "He held on to the");
  CHECK(cont == " oar");
}

TEST_CASE("story surprisal matches the counting oracle") {
  std::vector<std::vector<std::string>> corpus;
  for (const auto& l : kCorpus) corpus.push_back(oracle::words(l));
  for (int order : {2, 3}) {
    const auto lm = corpus_lm(order);
    const oracle::NaiveNgram naive(corpus, order, 0.5);
    const auto story = oar_story();
    for (Condition c : {Condition::animate, Condition::inanimate}) {
      const auto recs = story_surprisals(lm, story, c);
      REQUIRE(recs.size() == 1);
      CHECK(recs[0].span_label == "ADJ");
      CHECK(recs[0].stimulus_id == "r1");
      CHECK(recs[0].condition == c);
      CHECK(recs[0].token_count == 1);
      CHECK_FALSE(recs[0].boundary_merged);
      const auto toks = oracle::words(story.text(c));
      const std::size_t at = static_cast<std::size_t>(
          std::find(toks.begin(), toks.end(), "oar") - toks.begin());
      std::vector<std::string> upto(toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(at + 1));
      CHECK(std::abs(recs[0].surprisal_bits + naive.log2_prob(upto, at)) <= 1e-12);
    }
  }
}

TEST_CASE("baseline surprisal uses only the baseline context") {
  const auto lm = corpus_lm(2);
  const auto story = oar_story();
  const auto rec = baseline_surprisal(lm, story, Condition::animate);
  CHECK(rec.span_label == "ADJ_baseline");
  const std::vector<std::string> h{"the"};
  CHECK(rec.surprisal_bits == doctest::Approx(-std::log2(lm.probability(h, "oar"))));

  auto no_baseline = story;
  no_baseline.baseline_context_animate.reset();
  CHECK_THROWS_AS(baseline_surprisal(lm, no_baseline, Condition::animate), ValidationError);
}

TEST_CASE("sentence log-probability conditions the first token on the start symbol") {
  std::vector<std::vector<std::string>> corpus;
  for (const auto& l : kCorpus) corpus.push_back(oracle::words(l));
  const auto lm = corpus_lm(3);
  const oracle::NaiveNgram naive(corpus, 3, 0.5);
  const std::string sentence = "Naomi had cleaned a fork .";
  CHECK(std::abs(sentence_logprob_bits(lm, sentence) - naive.log2_prob(oracle::words(sentence))) <=
        1e-12);
}

TEST_CASE("minimal pair judgement is strict") {
  CHECK(compare_logprobs("p", -10.0, -12.0).correct);
  CHECK_FALSE(compare_logprobs("p", -12.0, -10.0).correct);
  CHECK_FALSE(compare_logprobs("p", -10.0, -10.0).correct);

  const auto lm = corpus_lm(3);
  const MinimalPairStimulus pair{"t1", "Naomi had cleaned a fork .", "the fork had cleaned Naomi .",
                                 PairDataset::animate_transitive};
  const auto out = eval_minimal_pair(lm, pair);
  CHECK(out.pair_id == "t1");
  CHECK(out.logprob_good_bits == doctest::Approx(sentence_logprob_bits(lm, pair.sentence_good)));
  CHECK(out.correct == (out.logprob_good_bits > out.logprob_bad_bits));

  const MinimalPairStimulus same{"t2", "a fork .", "a fork .", PairDataset::animate_passive};
  CHECK_THROWS_AS(eval_minimal_pair(lm, same), ValidationError);
}

TEST_CASE("minimal pair accuracy") {
  std::vector<MinimalPairOutcome> outs{compare_logprobs("a", -1, -2), compare_logprobs("b", -2, -1),
                                       compare_logprobs("c", -1, -3), compare_logprobs("d", -1, -1)};
  CHECK(minimal_pair_accuracy(outs) == 0.5);
  std::vector<MinimalPairOutcome> none;
  CHECK_THROWS_AS(minimal_pair_accuracy(none), ValidationError);
}

TEST_CASE("scoring is deterministic") {
  const auto lm = corpus_lm(3);
  const auto story = oar_story();
  CHECK(story_surprisals(lm, story, Condition::inanimate) ==
        story_surprisals(lm, story, Condition::inanimate));
}

}  // TEST_SUITE

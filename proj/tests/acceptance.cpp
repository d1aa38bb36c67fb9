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

// Acceptance gate: one PASS/FAIL line per criterion; non-zero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "animacy/config.hpp"
#include "animacy/digest.hpp"
#include "animacy/divergence.hpp"
#include "animacy/error.hpp"
#include "animacy/experiments.hpp"
#include "animacy/reference_lm.hpp"
#include "animacy/scoring.hpp"
#include "animacy/special_functions.hpp"
#include "animacy/stats.hpp"
#include "animacy/synthesis.hpp"
#include "animacy/tokenize.hpp"
#include "frozen_values.hpp"
#include "oracle.hpp"
#include "test_paths.hpp"

using namespace animacy;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// SHA-256 of `generate --pools data/pools --seed 20240521` (10,000 items).
// Frozen from the first build; any platform producing different bytes fails.
constexpr const char* kGoldenDatasetSha256 = "c1099d46299144da46a967a740801dd04c2fe57c04e9cd0bd06d8a4e8428ed49";
constexpr std::uint64_t kGoldenSeed = 20240521;

class Failures {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && list_.size() < 8) list_.push_back(what);
    if (!ok) ++failed_;
  }
  void close(double got, double want, double tol, const std::string& what) {
    check(std::abs(got - want) <= tol, what + ": got " + std::to_string(got) + ", want " + std::to_string(want));
  }
  bool ok() const { return failed_ == 0; }
  std::size_t checks() const { return checks_; }
  std::size_t failed() const { return failed_; }
  const std::vector<std::string>& list() const { return list_; }

 private:
  std::size_t checks_ = 0, failed_ = 0;
  std::vector<std::string> list_;
};

struct Scratch {
  fs::path dir;
  Scratch() {
    std::random_device rd;
    dir = fs::temp_directory_path() / ("animacy_accept_" + std::to_string(rd()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

std::string data(const std::string& rel) { return std::string(test_paths::kDataDir) + "/" + rel; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<json> jsonl(const fs::path& p) {
  std::vector<json> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(json::parse(line));
  }
  return rows;
}

int shell(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<std::vector<std::string>> toy_corpus_words() {
  std::vector<std::vector<std::string>> corpus;
  std::ifstream in(data("demo/toy_corpus.txt"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    corpus.push_back(oracle::words(line));
  }
  return corpus;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

ExperimentConfig toy_config(const std::string& experiment, const std::string& extra, int order,
                            const fs::path& out) {
  return resolve_experiment_config(Config::parse("experiment = " + experiment + "\nbackend.corpus = " +
                                                     data("demo/toy_corpus.txt") + "\nbackend.order = " +
                                                     std::to_string(order) + "\noutput_dir = " +
                                                     out.string() + "\nworkers = 4\n" + extra,
                                                 "/"));
}

// ---------------------------------------------------------------------------

void oracle_equivalence(Failures& f) {
  const auto start = std::chrono::steady_clock::now();

  // Worked values.
  {
    const std::vector<std::string> lines{"a b </s>", "a c </s>"};
    const auto lm = ReferenceLM::build_from_lines(lines, 2, 1.0);
    const std::vector<std::string> a{"a"};
    f.close(lm.probability(a, "b"), 1.0 / 3.0, 1e-15, "P(b|a)");
    f.close(sentence_logprob_bits(lm, "a b </s>"), std::log2(1.0 / 15.0), 1e-12, "log2 P(a b </s>)");
    const oracle::NaiveNgram naive({oracle::words(lines[0]), oracle::words(lines[1])}, 2, 1.0);
    f.close(naive.prob(a, "b"), 1.0 / 3.0, 1e-15, "oracle P(b|a)");
  }

  const auto corpus = toy_corpus_words();
  std::map<int, oracle::NaiveNgram> naive;
  for (int order : {3, 4, 6}) naive.emplace(order, oracle::NaiveNgram(corpus, order, 0.1));
  Scratch s;

  // Minimal pairs through the pipeline.
  {
    const auto cfg = toy_config("typical_animacy", "stimuli = " + data("demo/minimal_pairs.jsonl") + "\n", 3,
                                s.dir / "typical");
    run_pipeline(cfg);
    std::map<std::string, MinimalPairStimulus> pairs;
    for (auto& p : load_minimal_pairs(data("demo/minimal_pairs.jsonl"))) pairs[p.pair_id] = p;
    const auto rows = jsonl(cfg.output_dir / run_files::kOutcomes);
    f.check(rows.size() == pairs.size(), "typical_animacy record count");
    for (const auto& r : rows) {
      const auto& p = pairs.at(r["pair_id"].get<std::string>());
      f.close(r["logprob_good_bits"], naive.at(3).log2_prob(oracle::words(p.sentence_good)), 1e-9,
              "logprob " + p.pair_id + " good");
      f.close(r["logprob_bad_bits"], naive.at(3).log2_prob(oracle::words(p.sentence_bad)), 1e-9,
              "logprob " + p.pair_id + " bad");
    }
    f.check(verify_run(cfg.output_dir).ok, "typical_animacy verify");
  }

  // Story surprisals through the pipeline.
  const std::vector<std::pair<std::string, int>> story_runs{
      {"repetition", 3}, {"context", 6}, {"context_en", 6}, {"adaptation", 6}};
  for (const auto& [name, order] : story_runs) {
    const auto file = data("demo/" + name + ".jsonl");
    const auto cfg = toy_config(name, "stimuli = " + file + "\n", order, s.dir / name);
    run_pipeline(cfg);
    std::map<std::string, StoryStimulus> stories;
    for (auto& st : load_story_stimuli(file)) stories[st.story_id] = st;
    const auto& lm = naive.at(order);
    std::size_t expected = 0;
    for (const auto& [id, st] : stories) expected += 2 * (st.spans.size() + (st.baseline_context_animate ? 1 : 0));
    const auto rows = jsonl(cfg.output_dir / run_files::kSurprisals);
    f.check(rows.size() == expected, name + " record count");
    for (const auto& r : rows) {
      const auto& st = stories.at(r["stimulus_id"].get<std::string>());
      const auto cond = parse_condition(r["condition"].get<std::string>());
      auto label = r["span_label"].get<std::string>();
      const bool baseline = label.ends_with(kBaselineLabelSuffix);
      if (baseline) label.resize(label.size() - kBaselineLabelSuffix.size());
      const auto& text = st.text(cond);
      const auto span = std::find_if(st.spans.begin(), st.spans.end(),
                                     [&](const CriticalSpan& c) { return c.label == label; })
                            ->range(cond);
      const auto cont = oracle::words(text.substr(span.start, span.end - span.start));
      const auto prefix = oracle::words(baseline ? *st.baseline_context(cond) : text.substr(0, span.start));
      const double want = -lm.log2_prob(concat(prefix, cont), prefix.size());
      f.close(r["surprisal_bits"], want, 1e-9, name + " " + st.story_id + " " + r["span_label"].get<std::string>());
      f.check(r["token_count"].get<std::size_t>() == cont.size(), name + " token_count");
    }
    f.check(verify_run(cfg.output_dir).ok, name + " verify");
  }

  // Low-context divergences through the pipeline.
  {
    const auto cfg = toy_config("low_context",
                                "pools = " + data("pools") + "\nn = 300\nseed = 7\n", 4, s.dir / "low_context");
    run_pipeline(cfg);
    const auto ds = load_low_context((cfg.output_dir / run_files::kDataset).string());
    std::map<std::string, const LowContextItem*> items;
    for (const auto& i : ds.items) items[i.item_id] = &i;
    const auto rows = jsonl(cfg.output_dir / run_files::kDivergences);
    f.check(rows.size() == 300, "low_context record count");
    const auto& lm = naive.at(4);
    for (const auto& r : rows) {
      const auto& item = *items.at(r["item_id"].get<std::string>());
      const auto pO = lm.distribution(oracle::words(item.sentence_O));
      const auto pI = lm.distribution(oracle::words(item.sentence_I));
      const auto pA = lm.distribution(oracle::words(item.sentence_A));
      f.close(r["d_AO_bits"], oracle::kl_direct(pA, pO), 1e-9, item.item_id + " d_AO");
      f.close(r["d_IO_bits"], oracle::kl_direct(pI, pO), 1e-9, item.item_id + " d_IO");
      f.close(r["d_AI_bits"], oracle::kl_direct(pA, pI), 1e-9, item.item_id + " d_AI");
    }
    f.check(verify_run(cfg.output_dir).ok, "low_context verify");
  }

  // Chain rule: whole-sequence score = sum of per-token scores = sum of
  // log next-token probabilities, on every stimulus sentence.
  {
    const auto lm = ReferenceLM::load_corpus_file(data("demo/toy_corpus.txt"), 3, 0.1);
    std::vector<std::string> sentences;
    for (const auto& p : load_minimal_pairs(data("demo/minimal_pairs.jsonl"))) {
      sentences.push_back(p.sentence_good);
      sentences.push_back(p.sentence_bad);
    }
    for (const auto& st : load_story_stimuli(data("demo/repetition.jsonl"))) {
      sentences.push_back(st.text_animate);
      sentences.push_back(st.text_inanimate);
    }
    for (const auto& sent : sentences) {
      const auto toks = tokenize(sent);
      const double whole = sentence_logprob_bits(lm, sent);
      double stepwise = 0.0, via_dist = 0.0;
      std::string context;
      for (const auto& t : toks) {
        stepwise -= surprisal_bits(lm.score_continuation(context, (context.empty() ? "" : " ") + t));
        via_dist += std::log2(lm.next_distribution(context).probabilities.at(*lm.token_id(t)));
        context += (context.empty() ? "" : " ") + t;
      }
      f.close(stepwise, whole, 1e-9, "chain rule (continuations): " + sent.substr(0, 30));
      f.close(via_dist, whole, 1e-9, "chain rule (distributions): " + sent.substr(0, 30));
    }
  }

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  f.check(secs < 10.0, "runtime " + std::to_string(secs) + " s exceeds 10 s");
}

void statistics_suite(Failures& f) {
  const auto start = std::chrono::steady_clock::now();
  {
    const std::vector<double> x{1, 2, 3, 4, 5}, y(5, 0.0);
    const auto r = wilcoxon_signed_rank(x, y);
    f.close(r.p_value, 0.0625, 1e-15, "Wilcoxon d=[1..5] p");
    f.close(r.statistic, 15.0, 0.0, "Wilcoxon d=[1..5] W");
  }
  std::mt19937_64 rng(424242);
  std::size_t trials = 0;
  while (trials < 200) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng() % 7);
      y[i] = static_cast<double>(rng() % 7);
    }
    const auto [w, p] = oracle::wilcoxon_enumerate(x, y);
    bool all_zero = true;
    for (std::size_t i = 0; i < n; ++i) all_zero &= x[i] == y[i];
    if (all_zero) {
      bool threw = false;
      try {
        wilcoxon_signed_rank(x, y);
      } catch (const DegenerateInputError&) {
        threw = true;
      }
      f.check(threw, "all-zero differences must be degenerate");
      continue;
    }
    const auto r = wilcoxon_signed_rank(x, y);
    f.close(r.statistic, w, 1e-12, "Wilcoxon W trial " + std::to_string(trials));
    f.close(r.p_value, p, 1e-12, "Wilcoxon p trial " + std::to_string(trials));
    ++trials;
  }
  for (const auto& g : frozen::kTGrid) {
    f.close(special::student_t_two_sided(g.t, g.df), g.p, 1e-9, "t grid");
  }
  for (const auto& g : frozen::kFGrid) {
    f.close(special::f_sf(g.f, g.d1, g.d2), g.p, 1e-9, "F grid");
  }
  {
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    f.close(welch_t_test(a, b).p_value, 0.021311641128756725847, 1e-9, "Welch worked p");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  f.check(secs < 30.0, "runtime exceeds 30 s");
}

void divergence_properties(Failures& f) {
  std::mt19937_64 rng(31337);
  std::exponential_distribution<double> e(1.0);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<double> p(n), q(n);
    double sp = 0, sq = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sp += p[i] = e(rng) + 1e-9;
      sq += q[i] = e(rng) + 1e-9;
    }
    for (std::size_t i = 0; i < n; ++i) {
      p[i] /= sp;
      q[i] /= sq;
    }
    const double d = kl_bits(p, q);
    f.check(d >= 0.0, "kl >= 0");
    f.close(d, oracle::kl_direct(p, q), 1e-12, "kl vs direct sum");
    f.close(kl_bits(p, p), 0.0, 1e-12, "kl(p, p)");
  }

  const auto lm = ReferenceLM::load_corpus_file(data("demo/toy_corpus.txt"), 4, 0.1);
  LowContextItem item;
  item.item_id = "degenerate";
  item.prompt_template = "The [noun] [verb] and began to";
  item.noun = "chair";
  item.verb = "spoke";
  item.human_entity = "person";
  item.sentence_O = "The chair spoke and began to";
  item.sentence_I = "The chair began to";
  item.sentence_A = item.sentence_O;
  auto r = animacy_divergences(lm, item);
  f.check(r.d_AO_bits == 0.0, "O = A gives d_AO exactly 0");
  item.sentence_A = "The person began to";
  item.sentence_I = item.sentence_O;
  r = animacy_divergences(lm, item);
  f.check(r.d_IO_bits == 0.0, "O = I gives d_IO exactly 0");
  item.sentence_A = item.sentence_I = item.sentence_O;
  r = animacy_divergences(lm, item);
  f.check(r.d_AO_bits == 0.0 && r.d_IO_bits == 0.0 && r.d_AI_bits == 0.0, "O = I = A gives all zeros");
}

void dataset_determinism(Failures& f) {
  Scratch s;
  const std::string cli = test_paths::kCliPath;
  const auto a = s.dir / "a.jsonl", b = s.dir / "b.jsonl";
  const std::string seed = std::to_string(kGoldenSeed);
  if (!cli.empty()) {
    for (const auto& out : {a, b}) {
      f.check(shell(cli + " generate --pools " + data("pools") + " --seed " + seed + " --out " + out.string()) == 0,
              "generate exit code");
    }
  } else {
    const auto text = serialize_low_context(generate_low_context({data("pools"), kDatasetSize, kGoldenSeed}));
    std::ofstream(a, std::ios::binary) << text;
    std::ofstream(b, std::ios::binary) << text;
  }
  f.check(slurp(a) == slurp(b), "two generate runs are byte-identical");
  const auto digest = file_sha256(a.string());
  f.check(digest == kGoldenDatasetSha256, "dataset digest " + digest + " differs from the frozen digest");

  const auto ds = load_low_context(a.string());
  f.check(ds.items.size() == 10000, "item count " + std::to_string(ds.items.size()));
  f.check(ds.header.n == 10000 && ds.header.seed == kGoldenSeed, "header n / seed");
  std::size_t bad = 0;
  for (const auto& item : ds.items) {
    try {
      validate_item(item);
    } catch (const ValidationError&) {
      ++bad;
    }
  }
  f.check(bad == 0, std::to_string(bad) + " items fail I/A re-derivation");

  const auto pools = load_standard_pools(data("pools"));
  f.check(pools.nouns.size() == 181, "181 nouns");
  f.check(pools.verbs.size() == 191, "191 verbs");
  f.check(pools.templates.size() == 4, "4 templates");
}

double assignment_cost(const std::map<std::string, std::string>& assignment, const FrequencyTable& t) {
  double c = 0;
  for (const auto& [noun, human] : assignment) {
    c += std::abs(std::log(static_cast<double>(*t.lookup(noun)) / static_cast<double>(*t.lookup(human))));
  }
  return c;
}

// Exhaustive minimum-cost injective assignment.
std::pair<double, std::map<std::string, std::string>> brute_force(const std::vector<std::string>& nouns,
                                                                  const std::vector<std::string>& humans,
                                                                  const FrequencyTable& t) {
  double best = INFINITY;
  std::map<std::string, std::string> best_map;
  std::vector<std::string> current;
  std::set<std::string> used;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == nouns.size()) {
      std::map<std::string, std::string> m;
      for (std::size_t k = 0; k < nouns.size(); ++k) m[nouns[k]] = current[k];
      const double c = assignment_cost(m, t);
      if (c < best - 1e-12) {
        best = c;
        best_map = m;
      }
      return;
    }
    for (const auto& h : humans) {
      if (used.contains(h)) continue;
      used.insert(h);
      current.push_back(h);
      rec(i + 1);
      current.pop_back();
      used.erase(h);
    }
  };
  rec(0);
  return {best, best_map};
}

void frequency_matching(Failures& f) {
  const auto table = parse_frequency_table(
      "chair\t1000\nlamp\t400\nrock\t90\nkettle\t30\nwell\t5000\n"
      "doctor\t1000\nnurse\t400\nbaker\t90\nsailor\t30\npilot\t5000\nfarmer\t200\njudge\t7\n",
      "synthetic");
  const std::vector<std::string> nouns{"chair", "lamp", "rock", "kettle", "well"};
  const std::vector<std::string> humans{"doctor", "nurse", "baker", "sailor", "pilot", "farmer", "judge"};

  const auto m = match_frequencies(nouns, humans, table);
  const std::map<std::string, std::string> known{
      {"chair", "doctor"}, {"lamp", "nurse"}, {"rock", "baker"}, {"kettle", "sailor"}};
  f.check(m.assignment == known, "known optimal assignment recovered");
  f.check(std::find(m.excluded.begin(), m.excluded.end(), "well") != m.excluded.end(), "well excluded");
  f.check(!m.assignment.contains("well"), "well not assigned");
  const auto [cost, opt] = brute_force({"chair", "lamp", "rock", "kettle"}, humans, table);
  f.check(opt == known && cost == 0.0, "brute force agrees on the known optimum");
  f.close(m.min_ratio, 1.0, 1e-12, "min ratio");
  f.close(m.max_ratio, 1.0, 1e-12, "max ratio");

  const auto unflagged = match_frequencies(nouns, humans, table, {});
  f.check(unflagged.assignment.count("well") == 1 && unflagged.assignment.at("well") == "pilot",
          "well is matched when not flagged");

  // Near-miss frequencies: the brute-force optimum is still unique.
  const auto t2 = parse_frequency_table(
      "chair\t1000\nlamp\t410\nrock\t88\nkettle\t33\n"
      "doctor\t1040\nnurse\t395\nbaker\t95\nsailor\t31\nfarmer\t180\njudge\t9\n",
      "synthetic-2");
  const std::vector<std::string> n2{"chair", "lamp", "rock", "kettle"};
  const std::vector<std::string> h2{"doctor", "nurse", "baker", "sailor", "farmer", "judge"};
  const auto m2 = match_frequencies(n2, h2, t2);
  f.check(m2.assignment == brute_force(n2, h2, t2).second, "greedy equals brute force on near-miss table");
}

void end_to_end_repetition(Failures& f) {
  Scratch s;
  const auto conf = s.dir / "repetition.conf";
  std::ofstream(conf) << "experiment = repetition\nbackend = reference\nbackend.corpus = "
                      << data("demo/toy_corpus.txt") << "\nbackend.order = 3\nbackend.alpha = 0.1\nstimuli = "
                      << data("demo/repetition.jsonl") << "\noutput_dir = run\nworkers = 4\n";
  const auto dir = s.dir / "run";
  const std::string cli = test_paths::kCliPath;
  if (!cli.empty()) {
    f.check(shell(cli + " run --config " + conf.string()) == 0, "run repetition exit code");
  } else {
    run_pipeline(resolve_experiment_config(Config::load(conf)));
  }

  std::map<std::string, std::map<std::string, double>> by;  // condition:label -> story -> bits
  for (const auto& r : jsonl(dir / run_files::kSurprisals)) {
    by[r["condition"].get<std::string>() + ":" + r["span_label"].get<std::string>()]
      [r["stimulus_id"].get<std::string>()] = r["surprisal_bits"].get<double>();
  }
  auto mean_of = [&](const std::string& key) {
    double t = 0;
    for (const auto& [id, v] : by[key]) t += v;
    return by[key].empty() ? NAN : t / static_cast<double>(by[key].size());
  };
  const double an_t1 = mean_of("animate:T1"), in_t1 = mean_of("inanimate:T1"), in_t3 = mean_of("inanimate:T3");
  f.check(in_t1 > an_t1, "mean inanimate T1 > animate T1");
  double drop = 0;
  std::size_t dropped = 0;
  for (const auto& [id, t1] : by["inanimate:T1"]) {
    const double d = t1 - by["inanimate:T3"].at(id);
    drop += d;
    dropped += d > 0;
  }
  drop /= static_cast<double>(by["inanimate:T1"].size());
  f.check(drop > 0.0, "inanimate surprisal drops from T1 to T3");
  f.check(dropped == by["inanimate:T1"].size(), "every inanimate story drops from T1 to T3");
  f.close(in_t3, in_t1 - drop, 1e-9, "inanimate T3 = T1 minus drop");

  const auto report = json::parse(slurp(dir / run_files::kReport));
  for (const auto& c : report["cells"]) {
    f.close(c["mean_surprisal_bits"], mean_of(c["condition"].get<std::string>() + ":" + c["span_label"].get<std::string>()),
            1e-9, "report cell mean");
  }
  f.check(report["expectations"]["inanimate_T1_gt_animate_T1"] == true, "report expectation T1");
  f.check(report["expectations"]["inanimate_T3_lt_inanimate_T1"] == true, "report expectation T3");

  if (!cli.empty()) {
    f.check(shell(cli + " verify --dir " + dir.string()) == 0, "verify clean run");
    auto rows = jsonl(dir / run_files::kSurprisals);
    rows[0]["surprisal_bits"] = rows[0]["surprisal_bits"].get<double>() * 2;
    std::string text;
    for (const auto& r : rows) text += r.dump() + "\n";
    std::ofstream(dir / run_files::kSurprisals, std::ios::binary | std::ios::trunc) << text;
    f.check(shell(cli + " verify --dir " + dir.string()) == 4, "verify flags a tampered record");
  } else {
    f.check(verify_run(dir).ok, "verify clean run");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Failures&)>>> criteria{
      {"oracle-equivalence", oracle_equivalence},
      {"statistics-suite", statistics_suite},
      {"divergence-properties", divergence_properties},
      {"dataset-determinism", dataset_determinism},
      {"frequency-matching", frequency_matching},
      {"end-to-end-repetition", end_to_end_repetition},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Failures f;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(f);
    } catch (const std::exception& e) {
      f.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    if (f.ok()) {
      std::cout << "PASS " << name << " (" << f.checks() << " checks, " << timing << ")\n";
    } else {
      ++failed;
      std::cout << "FAIL " << name << " (" << f.failed() << "/" << f.checks() << " checks failed, " << timing
                << ")\n";
      for (const auto& m : f.list()) std::cout << "     " << m << "\n";
    }
  }
  return failed == 0 ? 0 : 1;
}

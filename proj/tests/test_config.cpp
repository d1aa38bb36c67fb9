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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "animacy/config.hpp"
#include "animacy/error.hpp"
#include "doctest.h"
#include "test_paths.hpp"

using namespace animacy;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
  std::random_device rd;
  auto dir = fs::temp_directory_path() / ("animacy_cfg_" + tag + "_" + std::to_string(rd()));
  fs::create_directories(dir);
  return dir;
}

std::string demo(const std::string& name) { return std::string(test_paths::kDataDir) + "/demo/" + name; }
std::string pools() { return std::string(test_paths::kDataDir) + "/pools"; }

Config story_config(const std::string& extra = "") {
  return Config::parse("experiment = repetition\nbackend.corpus = " + demo("toy_corpus.txt") +
                           "\nstimuli = " + demo("repetition.jsonl") + "\noutput_dir = out\n" + extra,
                       "/base");
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parse handles comments, blanks and whitespace") {
  const auto c = Config::parse("# header\n\n  experiment =  repetition  \r\nworkers=3\n", "/tmp/x", "t.conf");
  CHECK(c.get("experiment") == "repetition");
  CHECK(c.get_int("workers") == 3);
  CHECK(c.values().size() == 2);
  CHECK(c.source() == "t.conf");
  CHECK(c.get_or("seed", "none") == "none");
}

TEST_CASE("malformed documents raise ConfigError") {
  CHECK_THROWS_AS(Config::parse("experiment repetition\n", "/"), ConfigError);
  CHECK_THROWS_AS(Config::parse("= x\n", "/"), ConfigError);
  CHECK_THROWS_AS(Config::parse("colour = red\n", "/"), ConfigError);
  CHECK_THROWS_AS(Config::parse("workers = 1\nworkers = 2\n", "/"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/animacy.conf"), ConfigError);
}

TEST_CASE("typed getters") {
  const auto c = Config::parse("workers = 4x\nseed = 18446744073709551615\nci_level = 0.9\nresume = no\n"
                               "topk_ranks = 1, 2 ,-1,\nstimuli = a.jsonl\n",
                               "/data/cfg");
  CHECK_THROWS_AS(c.get_int("workers"), ConfigError);
  CHECK(c.get_uint("seed") == 18446744073709551615ull);
  CHECK(c.get_double("ci_level") == 0.9);
  CHECK_FALSE(c.get_bool("resume"));
  CHECK(c.get_list("topk_ranks") == std::vector<std::string>{"1", "2", "-1"});
  CHECK(c.get_path("stimuli") == fs::path("/data/cfg/a.jsonl"));
  CHECK_THROWS_AS(c.get("n"), ConfigError);
  CHECK_THROWS_AS(c.get_bool("ci_level"), ConfigError);
}

TEST_CASE("absolute paths are kept and relative ones normalized") {
  const auto c = Config::parse("output_dir = ../runs/./x\nstimuli = /abs/s.jsonl\n", "/a/b");
  CHECK(c.get_path("output_dir") == fs::path("/a/runs/x"));
  CHECK(c.get_path("stimuli") == fs::path("/abs/s.jsonl"));
}

TEST_CASE("environment overrides endpoint and worker count") {
  const auto dir = scratch_dir("env");
  const auto path = dir / "run.conf";
  std::ofstream(path) << "backend = remote\nbackend.url = http://a:1\nworkers = 2\n";
  ::setenv(kEnvBackendUrl, "http://override:9", 1);
  ::setenv(kEnvWorkers, "7", 1);
  const auto c = Config::load(path);
  ::unsetenv(kEnvBackendUrl);
  ::unsetenv(kEnvWorkers);
  CHECK(c.get("backend.url") == "http://override:9");
  CHECK(c.get_int("workers") == 7);
  CHECK(c.get("backend") == "remote");
  CHECK(c.base_dir() == fs::absolute(dir));

  const auto plain = Config::load(path);
  CHECK(plain.get("backend.url") == "http://a:1");
  fs::remove_all(dir);
}

TEST_CASE("resolve applies defaults") {
  const auto e = resolve_experiment_config(story_config());
  CHECK(e.experiment == ExperimentKind::repetition);
  CHECK(e.backend.kind == BackendSpec::Kind::reference);
  CHECK(e.backend.order == 3);
  CHECK(e.workers == 1);
  CHECK(e.failure_threshold == 0.0);
  CHECK(e.top_k == 10);
  CHECK(e.topk_ranks == std::vector<long long>{1, 2, 3, -3, -2, -1});
  CHECK(e.ci_level == 0.95);
  CHECK(e.resume);
  CHECK(e.output_dir == fs::path("/base/out"));
  REQUIRE(e.stimuli.size() == 1);
  CHECK(config_snapshot(e)["experiment"] == "repetition");
}

TEST_CASE("resolve rejects invalid settings") {
  CHECK_THROWS_AS(resolve_experiment_config(story_config("workers = 0\n")), ConfigError);
  CHECK_THROWS_AS(resolve_experiment_config(story_config("failure_threshold = 1.5\n")), ConfigError);
  CHECK_THROWS_AS(resolve_experiment_config(story_config("topk_ranks = 1,0\n")), ConfigError);
  CHECK_THROWS_AS(resolve_experiment_config(story_config("ci_level = 1\n")), ConfigError);
  CHECK_THROWS_AS(resolve_experiment_config(story_config("backend.order = 0\n")), ConfigError);
  CHECK_THROWS_AS(resolve_experiment_config(story_config("backend.alpha = 0\n")), ConfigError);
  CHECK_THROWS_AS(resolve_experiment_config(story_config("backend = magic\n")), ConfigError);
  CHECK_THROWS_AS(resolve_experiment_config(Config::parse("experiment = nope\n", "/")), ConfigError);

  CHECK_THROWS_AS(resolve_experiment_config(Config::parse(
                      "experiment = repetition\nbackend.corpus = /nonexistent\nstimuli = " +
                          demo("repetition.jsonl") + "\noutput_dir = o\n",
                      "/")),
                  ConfigError);
  CHECK_THROWS_AS(resolve_experiment_config(Config::parse(
                      "experiment = repetition\nbackend.corpus = " + demo("toy_corpus.txt") +
                          "\nstimuli = missing.jsonl\noutput_dir = o\n",
                      "/")),
                  ConfigError);
  CHECK_THROWS_AS(resolve_experiment_config(Config::parse("experiment = repetition\nbackend = remote\n"
                                                          "stimuli = " + demo("repetition.jsonl") +
                                                              "\noutput_dir = o\n",
                                                          "/")),
                  ConfigError);
}

TEST_CASE("low-context generation settings") {
  const std::string base = "experiment = low_context\nbackend.corpus = " + demo("toy_corpus.txt") +
                           "\npools = " + pools() + "\noutput_dir = o\n";
  CHECK_THROWS_AS(resolve_experiment_config(Config::parse(base, "/")), ConfigError);

  const auto e = resolve_experiment_config(Config::parse(base + "seed = 5\n", "/"));
  REQUIRE(e.generation.has_value());
  CHECK(e.generation->seed == 5);
  CHECK(e.generation->n == 10000);
  CHECK(e.generation->variant == Variant::base);

  CHECK_THROWS_AS(resolve_experiment_config(Config::parse(base + "seed = 5\nvariant = freq_matched\n", "/")),
                  ConfigError);
  CHECK_THROWS_AS(resolve_experiment_config(Config::parse(base + "seed = 5\nvariant = huge\n", "/")),
                  ConfigError);
  CHECK_THROWS_AS(resolve_experiment_config(Config::parse(base + "seed = 5\nn = 0\n", "/")), ConfigError);
  const auto fm = resolve_experiment_config(Config::parse(
      base + "seed = 5\nvariant = freq_matched\nfrequency_table = " + pools() + "/frequencies_synthetic.tsv\n",
      "/"));
  CHECK(fm.generation->frequency_table.has_value());
}

TEST_CASE("remote backend settings") {
  const auto e = resolve_experiment_config(Config::parse(
      "experiment = repetition\nbackend = remote\nbackend.url = http://127.0.0.1:9\nbackend.retries = 0\n"
      "backend.timeout_s = 0.5\nstimuli = " +
          demo("repetition.jsonl") + "\noutput_dir = o\n",
      "/"));
  CHECK(e.backend.kind == BackendSpec::Kind::remote);
  CHECK(e.backend.remote.url == "http://127.0.0.1:9");
  CHECK(e.backend.remote.retries == 0);
  CHECK(e.backend.remote.timeout_s == 0.5);
}

TEST_CASE("experiment kinds round-trip") {
  for (auto k : {ExperimentKind::typical_animacy, ExperimentKind::repetition, ExperimentKind::context,
                 ExperimentKind::adaptation, ExperimentKind::context_en, ExperimentKind::low_context}) {
    CHECK(parse_experiment_kind(to_string(k)) == k);
  }
  CHECK(is_story_experiment(ExperimentKind::context_en));
  CHECK_FALSE(is_story_experiment(ExperimentKind::low_context));
  CHECK(story_experiment(ExperimentKind::adaptation) == StoryExperiment::adaptation);
  CHECK_THROWS_AS(story_experiment(ExperimentKind::typical_animacy), ConfigError);
}

}  // TEST_SUITE

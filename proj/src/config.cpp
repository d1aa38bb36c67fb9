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

#include "animacy/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "animacy/error.hpp"

namespace animacy {
namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "experiment",      "backend",        "backend.corpus",  "backend.order",
      "backend.alpha",   "backend.url",    "backend.timeout_s", "backend.retries",
      "stimuli",         "dataset",        "pools",           "n",
      "seed",            "variant",        "frequency_table", "output_dir",
      "workers",         "failure_threshold", "top_k",        "topk_ranks",
      "ci_level",        "resume"};
  return keys;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || value.empty()) {
    throw ConfigError("config key '" + key + "': malformed number '" + value + "'");
  }
  return out;
}

fs::path require_existing(const std::string& key, const fs::path& p) {
  if (!fs::exists(p)) {
    throw ConfigError("config key '" + key + "': path does not exist: " + p.string());
  }
  return p;
}

}  // namespace

Config Config::parse(std::string_view text, fs::path base_dir, std::string source) {
  Config c;
  c.base_dir_ = std::move(base_dir);
  c.source_ = std::move(source);
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const std::string where = c.source_ + ":" + std::to_string(lineno);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!known_keys().contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (!c.values_.emplace(key, value).second) {
      throw ConfigError(where + ": duplicate key '" + key + "'");
    }
  }
  return c;
}

Config Config::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto c = parse(buf.str(), fs::absolute(path).parent_path(), path.string());
  c.apply_env();
  return c;
}

void Config::apply_env() {
  if (const char* url = std::getenv(kEnvBackendUrl); url && *url) values_["backend.url"] = url;
  if (const char* w = std::getenv(kEnvWorkers); w && *w) values_["workers"] = w;
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string Config::get_or(const std::string& key, std::string fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

long long Config::get_int(const std::string& key) const {
  return parse_number<long long>(key, get(key));
}

std::uint64_t Config::get_uint(const std::string& key) const {
  return parse_number<std::uint64_t>(key, get(key));
}

double Config::get_double(const std::string& key) const {
  return parse_number<double>(key, get(key));
}

bool Config::get_bool(const std::string& key) const {
  const auto& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

fs::path Config::get_path(const std::string& key) const {
  fs::path p(get(key));
  if (p.is_relative()) p = base_dir_ / p;
  return p.lexically_normal();
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  std::vector<std::string> out;
  std::string_view rest = get(key);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::typical_animacy: return "typical_animacy";
    case ExperimentKind::repetition: return "repetition";
    case ExperimentKind::context: return "context";
    case ExperimentKind::adaptation: return "adaptation";
    case ExperimentKind::context_en: return "context_en";
    case ExperimentKind::low_context: return "low_context";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view s) {
  for (auto k : {ExperimentKind::typical_animacy, ExperimentKind::repetition, ExperimentKind::context,
                 ExperimentKind::adaptation, ExperimentKind::context_en, ExperimentKind::low_context}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown experiment '" + std::string(s) + "'");
}

bool is_story_experiment(ExperimentKind k) {
  return k == ExperimentKind::repetition || k == ExperimentKind::context ||
         k == ExperimentKind::adaptation || k == ExperimentKind::context_en;
}

StoryExperiment story_experiment(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::repetition: return StoryExperiment::repetition;
    case ExperimentKind::context: return StoryExperiment::context;
    case ExperimentKind::adaptation: return StoryExperiment::adaptation;
    case ExperimentKind::context_en: return StoryExperiment::context_en;
    default: throw ConfigError(std::string(to_string(k)) + " is not a story experiment");
  }
}

ExperimentConfig resolve_experiment_config(const Config& c) {
  ExperimentConfig e;
  e.raw = c;
  e.experiment = parse_experiment_kind(c.get("experiment"));

  const auto backend = c.get_or("backend", "reference");
  if (backend == "reference") {
    e.backend.kind = BackendSpec::Kind::reference;
    e.backend.corpus = require_existing("backend.corpus", c.get_path("backend.corpus"));
    if (c.has("backend.order")) e.backend.order = static_cast<int>(c.get_int("backend.order"));
    if (c.has("backend.alpha")) e.backend.alpha = c.get_double("backend.alpha");
    if (e.backend.order < 1) throw ConfigError("backend.order must be >= 1");
    if (!(e.backend.alpha > 0.0)) throw ConfigError("backend.alpha must be > 0");
  } else if (backend == "remote") {
    e.backend.kind = BackendSpec::Kind::remote;
    e.backend.remote.url = c.get("backend.url");
    if (c.has("backend.timeout_s")) e.backend.remote.timeout_s = c.get_double("backend.timeout_s");
    if (c.has("backend.retries")) e.backend.remote.retries = static_cast<int>(c.get_int("backend.retries"));
    if (!(e.backend.remote.timeout_s > 0.0)) throw ConfigError("backend.timeout_s must be > 0");
    if (e.backend.remote.retries < 0) throw ConfigError("backend.retries must be >= 0");
  } else {
    throw ConfigError("backend must be 'reference' or 'remote', got '" + backend + "'");
  }

  if (e.experiment == ExperimentKind::low_context) {
    if (c.has("dataset")) {
      e.dataset = require_existing("dataset", c.get_path("dataset"));
      if (c.has("seed")) e.expected_seed = c.get_uint("seed");
    } else {
      GenerationSpec g;
      if (!c.has("seed")) throw ConfigError("seed is mandatory when the dataset is generated in-run");
      g.seed = c.get_uint("seed");
      g.pools = require_existing("pools", c.get_path("pools"));
      g.n = c.has("n") ? static_cast<std::size_t>(c.get_uint("n")) : 10000;
      if (g.n == 0) throw ConfigError("n must be positive");
      try {
        g.variant = parse_variant(c.get_or("variant", "base"));
      } catch (const ValidationError& err) {
        throw ConfigError(err.what());
      }
      if (g.variant == Variant::freq_matched) {
        g.frequency_table = require_existing("frequency_table", c.get_path("frequency_table"));
      }
      e.generation = g;
    }
  } else {
    for (const auto& item : c.get_list("stimuli")) {
      fs::path p(item);
      if (p.is_relative()) p = c.base_dir() / p;
      e.stimuli.push_back(require_existing("stimuli", p.lexically_normal()));
    }
    if (e.stimuli.empty()) throw ConfigError("stimuli lists no files");
  }

  e.output_dir = c.get_path("output_dir");
  if (c.has("workers")) {
    const auto w = c.get_int("workers");
    if (w < 1) throw ConfigError("workers must be >= 1");
    e.workers = static_cast<std::size_t>(w);
  }
  if (c.has("failure_threshold")) {
    e.failure_threshold = c.get_double("failure_threshold");
    if (e.failure_threshold < 0.0 || e.failure_threshold > 1.0) {
      throw ConfigError("failure_threshold must lie in [0, 1]");
    }
  }
  if (c.has("top_k")) {
    const auto k = c.get_int("top_k");
    if (k < 1) throw ConfigError("top_k must be >= 1");
    e.top_k = static_cast<std::size_t>(k);
  }
  if (c.has("topk_ranks")) {
    e.topk_ranks.clear();
    for (const auto& r : c.get_list("topk_ranks")) {
      const auto v = parse_number<long long>("topk_ranks", r);
      if (v == 0) throw ConfigError("topk_ranks are 1-based; negative values count from the end");
      e.topk_ranks.push_back(v);
    }
  }
  if (c.has("ci_level")) {
    e.ci_level = c.get_double("ci_level");
    if (!(e.ci_level > 0.0 && e.ci_level < 1.0)) throw ConfigError("ci_level must lie in (0, 1)");
  }
  if (c.has("resume")) e.resume = c.get_bool("resume");
  return e;
}

nlohmann::ordered_json config_snapshot(const ExperimentConfig& config) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.raw.values()) j[k] = v;
  return j;
}

}  // namespace animacy

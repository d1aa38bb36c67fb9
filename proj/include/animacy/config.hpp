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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "animacy/remote_backend.hpp"
#include "animacy/stimuli.hpp"
#include "json.hpp"

namespace animacy {

// Environment variables that override config entries.
inline constexpr const char* kEnvBackendUrl = "ANIMACY_BACKEND_URL";  // backend.url
inline constexpr const char* kEnvWorkers = "ANIMACY_WORKERS";         // workers

/// Flat `key = value` document. '#' starts a comment line; keys are unique.
/// Relative paths resolve against the directory holding the file.
class Config {
 public:
  Config() = default;

  static Config parse(std::string_view text, std::filesystem::path base_dir,
                      std::string source = "<config>");
  static Config load(const std::filesystem::path& path);

  // Applies kEnvBackendUrl / kEnvWorkers when set and non-empty.
  void apply_env();

  bool has(const std::string& key) const { return values_.contains(key); }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  // All getters throw ConfigError on a missing key or malformed value.
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, std::string fallback) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::filesystem::path get_path(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;  // comma separated

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }
  const std::string& source() const { return source_; }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
  std::string source_ = "<config>";
};

enum class ExperimentKind { typical_animacy, repetition, context, adaptation, context_en, low_context };
std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view s);
bool is_story_experiment(ExperimentKind k);
StoryExperiment story_experiment(ExperimentKind k);

struct BackendSpec {
  enum class Kind { reference, remote } kind = Kind::reference;
  std::filesystem::path corpus;
  int order = 3;
  double alpha = 0.1;
  RemoteConfig remote;
};

struct GenerationSpec {
  std::filesystem::path pools;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  Variant variant = Variant::base;
  std::optional<std::filesystem::path> frequency_table;  // freq_matched only
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::typical_animacy;
  BackendSpec backend;
  std::vector<std::filesystem::path> stimuli;
  std::optional<std::filesystem::path> dataset;     // low_context: existing dataset
  std::optional<std::uint64_t> expected_seed;       // low_context: checked against the header
  std::optional<GenerationSpec> generation;         // low_context: generate in-run
  std::filesystem::path output_dir;
  std::size_t workers = 1;
  double failure_threshold = 0.0;
  std::size_t top_k = 10;
  std::vector<long long> topk_ranks{1, 2, 3, -3, -2, -1};
  double ci_level = 0.95;
  bool resume = true;
  Config raw;
};

/// Validates keys, value types and that every referenced input path exists;
/// throws ConfigError.
ExperimentConfig resolve_experiment_config(const Config& config);

// Key/value snapshot written into run metadata.
nlohmann::ordered_json config_snapshot(const ExperimentConfig& config);

}  // namespace animacy

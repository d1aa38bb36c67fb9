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
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "animacy/backend.hpp"
#include "animacy/config.hpp"
#include "animacy/stimuli.hpp"
#include "json.hpp"

namespace animacy {

// Human accuracies annotated on the typical-animacy report.
inline constexpr double kHumanAccuracyTransitive = 0.87;
inline constexpr double kHumanAccuracyPassive = 0.86;

// Files inside a run's output directory.
namespace run_files {
inline constexpr const char* kRun = "run.json";              // experiment and report options
inline constexpr const char* kOutcomes = "outcomes.jsonl";   // typical_animacy
inline constexpr const char* kSurprisals = "surprisals.jsonl";  // story experiments
inline constexpr const char* kDivergences = "divergences.jsonl";  // low_context
inline constexpr const char* kTopk = "topk.jsonl";           // low_context
inline constexpr const char* kDataset = "dataset.jsonl";     // low_context
inline constexpr const char* kErrors = "errors.jsonl";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kTests = "tests.json";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace run_files

std::unique_ptr<Backend> make_backend(const BackendSpec& spec);

// Low-context dataset named by the config: loaded (header checked against
// the configured seed) or generated from pools.
LowContextDataset prepare_low_context_dataset(const ExperimentConfig& config);

// Synthesizes a dataset from the pool directory (freq_matched: matched humans).
LowContextDataset generate_low_context(const GenerationSpec& spec);

struct RunSummary {
  std::string experiment;
  std::size_t units = 0;    // stimuli (pairs, stories or items)
  std::size_t scored = 0;   // scored in this invocation
  std::size_t reused = 0;   // taken from an existing partial result file
  std::size_t failed = 0;
  std::size_t skipped = 0;  // never dispatched: the failure threshold was crossed first
  std::string dataset_sha256;
  double failure_rate() const { return units == 0 ? 0.0 : static_cast<double>(failed) / static_cast<double>(units); }
  bool threshold_exceeded(double threshold) const { return failure_rate() > threshold; }
};

/// Scores every stimulus of the configured experiment and persists
/// per-item results under config.output_dir.
///
/// Items are scored by config.workers threads. Each finished item is
/// appended to the result file immediately, so an interrupted run can be
/// resumed: with config.resume, items already present are not rescored.
/// On completion the result files are rewritten ordered by stimulus id;
/// failures go to errors.jsonl and never affect other items.
RunSummary run_experiment(const ExperimentConfig& config, const Backend& backend);

/// Aggregates derived purely from the per-item files of a run directory.
struct Analysis {
  nlohmann::ordered_json report;  // report.json
  nlohmann::ordered_json tests;   // tests.json
  std::map<std::string, std::string> tables;  // CSV name -> contents
  std::map<std::string, std::string> charts;  // SVG name -> contents
};

Analysis analyze_run(const std::filesystem::path& output_dir);

// Writes report.json / tests.json (analyze) and the CSV / SVG set (report).
void write_analysis(const std::filesystem::path& output_dir, const Analysis& analysis);
void write_tables(const std::filesystem::path& output_dir, const Analysis& analysis);

// report.json, tests.json, CSVs and SVGs in one go.
void emit_report(const std::filesystem::path& output_dir, const Analysis& analysis);

struct ManifestInputs {
  nlohmann::ordered_json config;
  nlohmann::json backend_info;
  std::string started_at;
  std::string finished_at;
  std::string status;             // "complete" or "partial"
  std::string dataset_sha256;     // header hash (low_context) or stimulus-file hash
  nlohmann::ordered_json summary;
};

// Digests every regular file in the directory except the manifest itself.
void write_manifest(const std::filesystem::path& output_dir, const ManifestInputs& inputs);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> mismatches;
  std::size_t values_checked = 0;
  std::size_t files_checked = 0;
};

/// Recomputes every aggregate from the per-item files and compares with the
/// persisted report (numbers within 1e-9), re-renders the tables, and checks
/// manifest digests.
VerifyReport verify_run(const std::filesystem::path& output_dir, double tolerance = 1e-9);

struct RunResult {
  RunSummary summary;
  bool threshold_exceeded = false;
};

// Full pipeline behind `run`: score, analyze, report, manifest. A crossed
// failure threshold skips analysis and leaves a partial manifest.
RunResult run_pipeline(const ExperimentConfig& config, const Backend* backend_override = nullptr);

std::string utc_timestamp();

}  // namespace animacy

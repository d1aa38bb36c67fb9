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

#include "animacy/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "animacy/digest.hpp"
#include "animacy/divergence.hpp"
#include "animacy/error.hpp"
#include "animacy/reference_lm.hpp"
#include "animacy/remote_backend.hpp"
#include "animacy/scoring.hpp"
#include "animacy/synthesis.hpp"

namespace animacy {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct UnitOutput {
  std::vector<ordered_json> primary;
  std::vector<ordered_json> extra;
};

struct Unit {
  std::string id;
  std::size_t expected_records = 1;
  std::function<UnitOutput()> score;
};

struct Layout {
  std::string primary;
  std::string extra;  // empty when the experiment has no secondary file
  std::string id_key;
};

Layout layout_for(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::typical_animacy: return {run_files::kOutcomes, "", "pair_id"};
    case ExperimentKind::low_context: return {run_files::kDivergences, run_files::kTopk, "item_id"};
    default: return {run_files::kSurprisals, "", "stimulus_id"};
  }
}

ordered_json to_json(const SurprisalRecord& r) {
  return {{"stimulus_id", r.stimulus_id},     {"condition", to_string(r.condition)},
          {"span_label", r.span_label},       {"surprisal_bits", r.surprisal_bits},
          {"token_count", r.token_count},     {"boundary_merged", r.boundary_merged}};
}

ordered_json to_json(const ContinuationList& list, const std::string& item_id, const char* reference) {
  ordered_json tokens = ordered_json::array();
  ordered_json probs = ordered_json::array();
  for (const auto& [tok, p] : list.entries) {
    tokens.push_back(tok);
    probs.push_back(p);
  }
  return {{"item_id", item_id},
          {"reference", reference},
          {"context", list.context},
          {"tokens", std::move(tokens)},
          {"probabilities", std::move(probs)}};
}

std::vector<MinimalPairStimulus> load_pairs(const std::vector<fs::path>& files) {
  std::vector<MinimalPairStimulus> all;
  std::set<std::string> seen;
  for (const auto& f : files) {
    for (auto& p : load_minimal_pairs(f.string())) {
      if (!seen.insert(p.pair_id).second) {
        throw ValidationError("duplicate pair_id '" + p.pair_id + "' across stimulus files");
      }
      all.push_back(std::move(p));
    }
  }
  return all;
}

std::vector<StoryStimulus> load_stories(const std::vector<fs::path>& files, StoryExperiment expected) {
  std::vector<StoryStimulus> all;
  std::set<std::string> seen;
  const bool needs_baseline =
      expected == StoryExperiment::context || expected == StoryExperiment::context_en;
  for (const auto& f : files) {
    for (auto& s : load_story_stimuli(f.string())) {
      if (s.experiment != expected) {
        throw ValidationError(f.string() + ": story '" + s.story_id + "' belongs to the " +
                              std::string(to_string(s.experiment)) + " experiment");
      }
      if (needs_baseline && (!s.baseline_context_animate || !s.baseline_context_inanimate)) {
        throw ValidationError(f.string() + ": story '" + s.story_id + "' is missing baseline_context");
      }
      if (!seen.insert(s.story_id).second) {
        throw ValidationError("duplicate story_id '" + s.story_id + "' across stimulus files");
      }
      all.push_back(std::move(s));
    }
  }
  return all;
}

void write_text(const fs::path& path, const std::string& text) {
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Lines of an existing per-item file grouped by id; a torn final line from an
// interrupted run is dropped.
std::map<std::string, std::vector<ordered_json>> read_partial(const fs::path& path, const std::string& key) {
  std::map<std::string, std::vector<ordered_json>> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception&) {
      continue;
    }
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) continue;
    out[it->get<std::string>()].push_back(std::move(j));
  }
  return out;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const BackendError*>(&e)) return "backend";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const DegenerateInputError*>(&e)) return "degenerate";
  return "internal";
}

std::vector<Unit> build_units(const ExperimentConfig& config, const Backend& backend,
                              std::string& dataset_hash, const fs::path& out_dir) {
  std::vector<Unit> units;
  switch (config.experiment) {
    case ExperimentKind::typical_animacy: {
      auto pairs = std::make_shared<std::vector<MinimalPairStimulus>>(load_pairs(config.stimuli));
      for (std::size_t i = 0; i < pairs->size(); ++i) {
        units.push_back({(*pairs)[i].pair_id, 1, [pairs, i, &backend] {
                           const auto& p = (*pairs)[i];
                           const auto o = eval_minimal_pair(backend, p);
                           UnitOutput u;
                           u.primary.push_back({{"pair_id", o.pair_id},
                                                {"dataset", to_string(p.dataset)},
                                                {"logprob_good_bits", o.logprob_good_bits},
                                                {"logprob_bad_bits", o.logprob_bad_bits},
                                                {"correct", o.correct}});
                           return u;
                         }});
      }
      break;
    }
    case ExperimentKind::repetition:
    case ExperimentKind::context:
    case ExperimentKind::adaptation:
    case ExperimentKind::context_en: {
      const auto exp = story_experiment(config.experiment);
      auto stories = std::make_shared<std::vector<StoryStimulus>>(load_stories(config.stimuli, exp));
      const bool baseline = exp == StoryExperiment::context || exp == StoryExperiment::context_en;
      for (std::size_t i = 0; i < stories->size(); ++i) {
        const std::size_t per_condition = (*stories)[i].spans.size() + (baseline ? 1 : 0);
        units.push_back({(*stories)[i].story_id, 2 * per_condition, [stories, i, baseline, &backend] {
                           const auto& s = (*stories)[i];
                           UnitOutput u;
                           for (Condition c : {Condition::animate, Condition::inanimate}) {
                             for (const auto& r : story_surprisals(backend, s, c)) u.primary.push_back(to_json(r));
                             if (baseline) u.primary.push_back(to_json(baseline_surprisal(backend, s, c)));
                           }
                           return u;
                         }});
      }
      break;
    }
    case ExperimentKind::low_context: {
      auto ds = std::make_shared<LowContextDataset>(prepare_low_context_dataset(config));
      const auto text = serialize_low_context(*ds);
      write_text(out_dir / run_files::kDataset, text);
      dataset_hash = sha256_hex(to_json(ds->header).dump());
      const std::size_t k = std::min(config.top_k, backend.descriptor().vocab_size);
      for (std::size_t i = 0; i < ds->items.size(); ++i) {
        units.push_back({ds->items[i].item_id, 1, [ds, i, k, &backend] {
                           const auto& item = ds->items[i];
                           const auto dists = reference_distributions(backend, item);
                           const auto rec = animacy_divergences(item, dists);
                           UnitOutput u;
                           u.primary.push_back({{"item_id", rec.item_id},
                                                {"d_AO_bits", rec.d_AO_bits},
                                                {"d_IO_bits", rec.d_IO_bits},
                                                {"d_AI_bits", rec.d_AI_bits},
                                                {"human_entity_used", rec.human_entity_used}});
                           u.extra.push_back(to_json(top_k(dists.O, k), item.item_id, "O"));
                           u.extra.push_back(to_json(top_k(dists.I, k), item.item_id, "I"));
                           u.extra.push_back(to_json(top_k(dists.A, k), item.item_id, "A"));
                           return u;
                         }});
      }
      break;
    }
  }
  if (config.experiment != ExperimentKind::low_context) {
    std::string joined;
    for (const auto& f : config.stimuli) joined += file_sha256(f.string());
    dataset_hash = config.stimuli.size() == 1 ? joined : sha256_hex(joined);
  }
  return units;
}

std::string render_lines(const std::vector<ordered_json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

}  // namespace

std::unique_ptr<Backend> make_backend(const BackendSpec& spec) {
  if (spec.kind == BackendSpec::Kind::remote) return std::make_unique<RemoteBackend>(spec.remote);
  return std::make_unique<ReferenceLM>(
      ReferenceLM::load_corpus_file(spec.corpus.string(), spec.order, spec.alpha));
}

LowContextDataset prepare_low_context_dataset(const ExperimentConfig& config) {
  if (config.dataset) {
    auto ds = load_low_context(config.dataset->string());
    if (config.expected_seed && *config.expected_seed != ds.header.seed) {
      throw ConfigError("dataset header seed " + std::to_string(ds.header.seed) +
                        " does not match configured seed " + std::to_string(*config.expected_seed));
    }
    for (const auto& item : ds.items) validate_item(item);
    return ds;
  }
  if (!config.generation) throw ConfigError("low_context needs either dataset or a generation spec");
  return generate_low_context(*config.generation);
}

LowContextDataset generate_low_context(const GenerationSpec& g) {
  const auto pools = load_standard_pools(g.pools.string());
  const auto& humans = g.variant == Variant::large_pool ? pools.humans_large : pools.humans_base;
  if (g.variant == Variant::freq_matched) {
    const auto table = load_frequency_table(g.frequency_table->string());
    std::vector<std::string> nouns;
    for (const auto& n : pools.nouns) nouns.push_back(n.noun);
    const auto match = match_frequencies(nouns, pools.human_candidates, table);
    return synthesize_low_context(pools.nouns, pools.verbs, pools.templates, {}, {g.n, g.seed, g.variant},
                                  &match.assignment);
  }
  return synthesize_low_context(pools.nouns, pools.verbs, pools.templates, humans, {g.n, g.seed, g.variant});
}

RunSummary run_experiment(const ExperimentConfig& config, const Backend& backend) {
  fs::create_directories(config.output_dir);
  const auto layout = layout_for(config.experiment);
  std::string dataset_hash;
  auto units = build_units(config, backend, dataset_hash, config.output_dir);
  std::sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) { return a.id < b.id; });

  RunSummary summary;
  summary.experiment = std::string(to_string(config.experiment));
  summary.units = units.size();
  summary.dataset_sha256 = dataset_hash;

  const auto primary_path = config.output_dir / layout.primary;
  const auto extra_path = layout.extra.empty() ? fs::path{} : config.output_dir / layout.extra;

  std::map<std::string, UnitOutput> done;
  if (config.resume) {
    auto prior = read_partial(primary_path, layout.id_key);
    std::map<std::string, std::vector<ordered_json>> prior_extra;
    if (!extra_path.empty()) prior_extra = read_partial(extra_path, "item_id");
    for (const auto& u : units) {
      auto it = prior.find(u.id);
      if (it == prior.end() || it->second.size() != u.expected_records) continue;
      if (!extra_path.empty() && prior_extra[u.id].size() != 3) continue;
      UnitOutput out;
      out.primary = std::move(it->second);
      if (!extra_path.empty()) out.extra = std::move(prior_extra[u.id]);
      done.emplace(u.id, std::move(out));
    }
  }
  summary.reused = done.size();

  // Start the append logs from the reusable records only.
  write_text(primary_path, [&] {
    std::string s;
    for (const auto& u : units) {
      if (auto it = done.find(u.id); it != done.end()) s += render_lines(it->second.primary);
    }
    return s;
  }());
  if (!extra_path.empty()) {
    write_text(extra_path, [&] {
      std::string s;
      for (const auto& u : units) {
        if (auto it = done.find(u.id); it != done.end()) s += render_lines(it->second.extra);
      }
      return s;
    }());
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!done.contains(units[i].id)) pending.push_back(i);
  }

  std::mutex mu;
  std::ofstream primary_log(primary_path, std::ios::binary | std::ios::app);
  std::ofstream extra_log;
  if (!extra_path.empty()) extra_log.open(extra_path, std::ios::binary | std::ios::app);
  std::map<std::string, ordered_json> errors;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failed{0};
  std::atomic<bool> abort{false};
  const double budget = config.failure_threshold * static_cast<double>(units.size());

  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= pending.size()) return;
      const Unit& unit = units[pending[slot]];
      try {
        UnitOutput out = unit.score();
        const auto p = render_lines(out.primary);
        const auto x = render_lines(out.extra);
        std::lock_guard lock(mu);
        primary_log << p << std::flush;
        if (extra_log.is_open()) extra_log << x << std::flush;
        done.emplace(unit.id, std::move(out));
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        errors[unit.id] = {{"id", unit.id}, {"kind", error_kind(e)}, {"error", e.what()}};
        if (static_cast<double>(failed.fetch_add(1) + 1) > budget) abort.store(true);
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(config.workers, pending.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  primary_log.close();
  if (extra_log.is_open()) extra_log.close();

  summary.failed = errors.size();
  summary.scored = done.size() - summary.reused;
  summary.skipped = units.size() - done.size() - errors.size();

  // Final files in stimulus-id order.
  std::string primary_text, extra_text;
  for (const auto& u : units) {
    if (auto it = done.find(u.id); it != done.end()) {
      primary_text += render_lines(it->second.primary);
      extra_text += render_lines(it->second.extra);
    }
  }
  write_text(primary_path, primary_text);
  if (!extra_path.empty()) write_text(extra_path, extra_text);
  std::vector<ordered_json> error_rows;
  for (auto& [id, e] : errors) error_rows.push_back(std::move(e));
  write_text(config.output_dir / run_files::kErrors, render_lines(error_rows));

  ordered_json run = {{"experiment", summary.experiment},
                      {"ci_level", config.ci_level},
                      {"top_k", config.top_k},
                      {"topk_ranks", config.topk_ranks},
                      {"units", summary.units},
                      {"failed", summary.failed},
                      {"skipped", summary.skipped},
                      {"dataset_sha256", dataset_hash},
                      {"config", config_snapshot(config)}};
  write_text(config.output_dir / run_files::kRun, run.dump(2) + "\n");
  return summary;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const fs::path& output_dir, const ManifestInputs& in) {
  ordered_json files = ordered_json::object();
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(output_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name == run_files::kManifest || name.ends_with(".tmp")) continue;
    paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) files[p.filename().string()] = file_sha256(p.string());
  ordered_json m = {{"status", in.status},
                    {"config", in.config},
                    {"backend_info", in.backend_info},
                    {"started_at", in.started_at},
                    {"finished_at", in.finished_at},
                    {"dataset_sha256", in.dataset_sha256},
                    {"summary", in.summary},
                    {"files", std::move(files)}};
  write_text(output_dir / run_files::kManifest, m.dump(2) + "\n");
}

RunResult run_pipeline(const ExperimentConfig& config, const Backend* backend_override) {
  const auto started = utc_timestamp();
  std::unique_ptr<Backend> owned;
  const Backend* backend = backend_override;
  if (!backend) {
    owned = make_backend(config.backend);
    backend = owned.get();
  }
  RunResult result;
  result.summary = run_experiment(config, *backend);
  result.threshold_exceeded = result.summary.threshold_exceeded(config.failure_threshold);
  if (result.threshold_exceeded) {
    fs::remove(config.output_dir / run_files::kReport);
    fs::remove(config.output_dir / run_files::kTests);
  } else {
    emit_report(config.output_dir, analyze_run(config.output_dir));
  }

  ManifestInputs m;
  m.config = config_snapshot(config);
  m.backend_info = backend->info();
  m.started_at = started;
  m.finished_at = utc_timestamp();
  m.status = result.threshold_exceeded ? "partial" : "complete";
  m.dataset_sha256 = result.summary.dataset_sha256;
  m.summary = {{"units", result.summary.units},
               {"scored", result.summary.scored},
               {"reused", result.summary.reused},
               {"failed", result.summary.failed},
               {"skipped", result.summary.skipped},
               {"failure_rate", result.summary.failure_rate()},
               {"failure_threshold", config.failure_threshold}};
  write_manifest(config.output_dir, m);
  return result;
}

}  // namespace animacy

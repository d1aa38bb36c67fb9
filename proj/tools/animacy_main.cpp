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

// animacy: command-line driver for the animacy evaluation harness.
//
//   animacy generate --pools DIR --seed S [--n N] [--variant V] [--frequency-table F] --out FILE
//   animacy run      --config FILE
//   animacy analyze  --dir RUN_DIR
//   animacy report   --dir RUN_DIR
//   animacy verify   --dir RUN_DIR
//   animacy serve    --corpus FILE [--order N] [--alpha A] [--port P]
//
// Exit codes: 0 success, 1 other failure, 2 config or input error,
// 3 backend failure threshold exceeded (or backend unusable), 4 verification
// mismatch.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "animacy/config.hpp"
#include "animacy/error.hpp"
#include "animacy/experiments.hpp"
#include "animacy/reference_lm.hpp"
#include "animacy/stimuli.hpp"
#include "animacy/wire_server.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitThreshold = 3;
constexpr int kExitMismatch = 4;

namespace fs = std::filesystem;
using namespace animacy;

int cmd_generate(const GenerationSpec& spec, const fs::path& out) {
  const auto ds = generate_low_context(spec);
  const auto text = serialize_low_context(ds);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + out.string());
    f << text;
    if (!f) throw Error("write failed: " + out.string());
  }
  std::cerr << "generated " << ds.items.size() << " items (seed " << ds.header.seed << ", variant "
            << to_string(ds.header.variant) << ")\n";
  return kExitOk;
}

int cmd_run(const fs::path& config_path) {
  const auto config = resolve_experiment_config(Config::load(config_path));
  const auto result = run_pipeline(config);
  const auto& s = result.summary;
  std::cerr << s.experiment << ": " << s.units << " units, " << s.scored << " scored, " << s.reused
            << " reused, " << s.failed << " failed, " << s.skipped << " skipped -> "
            << config.output_dir.string() << "\n";
  if (result.threshold_exceeded) {
    std::cerr << "failure rate " << s.failure_rate() << " exceeds threshold " << config.failure_threshold
              << "; run left partial\n";
    return kExitThreshold;
  }
  return kExitOk;
}

int cmd_analyze(const fs::path& dir) {
  write_analysis(dir, analyze_run(dir));
  std::cerr << "wrote " << (dir / run_files::kReport).string() << "\n";
  return kExitOk;
}

int cmd_report(const fs::path& dir) {
  const auto a = analyze_run(dir);
  emit_report(dir, a);
  for (const auto& [name, text] : a.tables) std::cerr << "wrote " << (dir / name).string() << "\n";
  for (const auto& [name, text] : a.charts) std::cerr << "wrote " << (dir / name).string() << "\n";
  return kExitOk;
}

int cmd_verify(const fs::path& dir) {
  const auto r = verify_run(dir);
  for (const auto& m : r.mismatches) std::cout << "MISMATCH " << m << "\n";
  std::cout << (r.ok ? "OK" : "FAILED") << ": " << r.values_checked << " values, " << r.files_checked
            << " files checked, " << r.mismatches.size() << " mismatches\n";
  return r.ok ? kExitOk : kExitMismatch;
}

int cmd_serve(const fs::path& corpus, int order, double alpha, int port) {
  const auto lm = ReferenceLM::load_corpus_file(corpus.string(), order, alpha);
  WireServer server(lm);
  std::cerr << "serving " << corpus.string() << " (order " << order << ") on 127.0.0.1:" << port << "\n";
  server.listen("127.0.0.1", port);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Animacy evaluation harness"};
  app.require_subcommand(1);

  GenerationSpec gen;
  std::string variant = "base";
  std::string freq_table;
  fs::path gen_out;
  auto* generate = app.add_subcommand("generate", "Synthesize a low-context dataset");
  generate->add_option("--pools", gen.pools, "Pool directory")->required();
  generate->add_option("--n", gen.n, "Number of items")->default_val(10000);
  generate->add_option("--seed", gen.seed, "Sampler seed")->required();
  generate->add_option("--variant", variant, "base, large_pool, freq_matched or cataphoric");
  generate->add_option("--frequency-table", freq_table, "word<TAB>count table (freq_matched)");
  generate->add_option("--out", gen_out, "Output JSONL ('-' for stdout)")->default_val("-");

  fs::path config_path;
  auto* run = app.add_subcommand("run", "Score an experiment, then analyze and report");
  run->add_option("--config", config_path, "key=value config file")->required();

  fs::path dir;
  auto* analyze = app.add_subcommand("analyze", "Recompute report.json and tests.json");
  analyze->add_option("--dir", dir, "Run directory")->required();
  auto* report = app.add_subcommand("report", "Write report, CSV tables and SVG charts");
  report->add_option("--dir", dir, "Run directory")->required();
  auto* verify = app.add_subcommand("verify", "Recompute and compare against persisted outputs");
  verify->add_option("--dir", dir, "Run directory")->required();

  fs::path corpus;
  int order = 3;
  double alpha = 0.1;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Expose the reference model over the wire protocol");
  serve->add_option("--corpus", corpus, "Training corpus")->required();
  serve->add_option("--order", order, "n-gram order")->default_val(3);
  serve->add_option("--alpha", alpha, "Additive smoothing")->default_val(0.1);
  serve->add_option("--port", port, "TCP port")->default_val(8080);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*generate) {
      gen.variant = parse_variant(variant);
      if (!freq_table.empty()) gen.frequency_table = fs::path(freq_table);
      if (gen.variant == Variant::freq_matched && !gen.frequency_table) {
        throw ConfigError("--variant freq_matched requires --frequency-table");
      }
      if (gen.n == 0) throw ConfigError("--n must be positive");
      return cmd_generate(gen, gen_out);
    }
    if (*run) return cmd_run(config_path);
    if (*analyze) return cmd_analyze(dir);
    if (*report) return cmd_report(dir);
    if (*verify) return cmd_verify(dir);
    if (*serve) return cmd_serve(corpus, order, alpha, port);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BackendError& e) {
    std::cerr << "backend failure: " << e.what() << "\n";
    return kExitThreshold;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}

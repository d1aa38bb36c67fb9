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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "animacy/config.hpp"
#include "animacy/divergence.hpp"
#include "animacy/error.hpp"
#include "animacy/experiments.hpp"
#include "animacy/reference_lm.hpp"
#include "animacy/remote_backend.hpp"
#include "animacy/scoring.hpp"
#include "animacy/stats.hpp"
#include "animacy/synthesis.hpp"
#include "animacy/tokenize.hpp"
#include "animacy/wire_server.hpp"

namespace py = pybind11;
using namespace animacy;

namespace {

template <typename J>
py::object to_py(const J& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_py(const py::handle& obj) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::dict test_dict(const TestResult& r) { return to_py(to_json(r)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Animacy evaluation harness: reference model, scoring, divergences, stimuli and statistics.";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<BackendError>(m, "BackendError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", base.ptr());
  py::register_exception<VerificationError>(m, "VerificationError", base.ptr());

  m.def("tokenize", [](const std::string& text) { return tokenize(text); });

  py::class_<TokenDistribution>(m, "TokenDistribution")
      .def_readonly("context", &TokenDistribution::context)
      .def_readonly("probabilities", &TokenDistribution::probabilities)
      .def_readonly("token_strings", &TokenDistribution::token_strings);

  py::class_<ScoredContinuation>(m, "ScoredContinuation")
      .def_readonly("context", &ScoredContinuation::context)
      .def_readonly("continuation", &ScoredContinuation::continuation)
      .def_readonly("token_logprobs", &ScoredContinuation::token_logprobs)
      .def_readonly("token_texts", &ScoredContinuation::token_texts)
      .def_readonly("boundary_merged", &ScoredContinuation::boundary_merged);

  py::class_<Backend>(m, "Backend")
      .def_property_readonly("name", [](const Backend& b) { return b.descriptor().name; })
      .def_property_readonly("vocab_size", [](const Backend& b) { return b.descriptor().vocab_size; })
      .def_property_readonly("adds_bos", [](const Backend& b) { return b.descriptor().adds_bos; })
      .def("next_distribution", &Backend::next_distribution, py::arg("context"),
           py::call_guard<py::gil_scoped_release>())
      .def("score_continuation", &Backend::score_continuation, py::arg("context"), py::arg("continuation"),
           py::call_guard<py::gil_scoped_release>())
      .def("info", [](const Backend& b) { return to_py(b.info()); });

  py::class_<ReferenceLM, Backend>(m, "ReferenceLM")
      .def(py::init([](const std::vector<std::string>& lines, int order, double alpha) {
             return ReferenceLM::build_from_lines(lines, order, alpha);
           }),
           py::arg("lines"), py::arg("order") = 3, py::arg("alpha") = 0.1)
      .def_static("from_file", &ReferenceLM::load_corpus_file, py::arg("path"), py::arg("order") = 3,
                  py::arg("alpha") = 0.1, py::arg("name") = "reference-ngram")
      .def_property_readonly("order", &ReferenceLM::order)
      .def_property_readonly("alpha", &ReferenceLM::alpha)
      .def_property_readonly("vocabulary", &ReferenceLM::vocabulary)
      .def("probability", [](const ReferenceLM& lm, const std::vector<std::string>& history,
                             const std::string& token) { return lm.probability(history, token); });

  py::class_<RemoteBackend, Backend>(m, "RemoteBackend")
      .def(py::init([](const std::string& url, double timeout_s, int retries) {
             return std::make_unique<RemoteBackend>(RemoteConfig{url, timeout_s, retries});
           }),
           py::arg("url"), py::arg("timeout_s") = 60.0, py::arg("retries") = 2);

  py::class_<WireServer>(m, "WireServer")
      .def(py::init([](const Backend& backend, bool inline_token_strings, std::size_t page_size) {
             return std::make_unique<WireServer>(backend, WireServer::Options{inline_token_strings, page_size});
           }),
           py::arg("backend"), py::arg("inline_token_strings") = true, py::arg("page_size") = 1024,
           py::keep_alive<1, 2>())
      .def("start", &WireServer::start, py::arg("host") = "127.0.0.1", py::arg("port") = 0)
      .def("stop", &WireServer::stop, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("url", &WireServer::url);

  // Scoring.
  m.def("surprisal_bits", &surprisal_bits, py::arg("scored"));
  m.def("sentence_logprob_bits", &sentence_logprob_bits, py::arg("backend"), py::arg("sentence"));
  m.def(
      "eval_minimal_pair",
      [](const Backend& b, const std::string& good, const std::string& bad, const std::string& pair_id) {
        const auto o = eval_minimal_pair(b, {pair_id, good, bad, PairDataset::animate_transitive});
        py::dict d;
        d["pair_id"] = o.pair_id;
        d["logprob_good_bits"] = o.logprob_good_bits;
        d["logprob_bad_bits"] = o.logprob_bad_bits;
        d["correct"] = o.correct;
        return d;
      },
      py::arg("backend"), py::arg("good"), py::arg("bad"), py::arg("pair_id") = "pair");
  m.def(
      "story_surprisals",
      [](const Backend& b, const py::dict& story) {
        const auto s = story_from_json(from_py(story));
        py::list out;
        for (auto c : {Condition::animate, Condition::inanimate}) {
          auto records = story_surprisals(b, s, c);
          if (s.baseline_context(c)) records.push_back(baseline_surprisal(b, s, c));
          for (const auto& r : records) {
            py::dict d;
            d["stimulus_id"] = r.stimulus_id;
            d["condition"] = std::string(to_string(r.condition));
            d["span_label"] = r.span_label;
            d["surprisal_bits"] = r.surprisal_bits;
            d["token_count"] = r.token_count;
            d["boundary_merged"] = r.boundary_merged;
            out.append(d);
          }
        }
        return out;
      },
      py::arg("backend"), py::arg("story"));

  // Divergences.
  m.def(
      "kl_bits", [](const std::vector<double>& p, const std::vector<double>& q) { return kl_bits(p, q); },
      py::arg("p"), py::arg("q"));
  m.def(
      "animacy_divergences",
      [](const Backend& b, const py::dict& item) {
        const auto r = animacy_divergences(b, item_from_json(from_py(item)));
        py::dict d;
        d["item_id"] = r.item_id;
        d["d_AO_bits"] = r.d_AO_bits;
        d["d_IO_bits"] = r.d_IO_bits;
        d["d_AI_bits"] = r.d_AI_bits;
        d["human_entity_used"] = r.human_entity_used;
        return d;
      },
      py::arg("backend"), py::arg("item"));
  m.def(
      "top_k_continuations",
      [](const Backend& b, const std::string& context, std::size_t k) {
        return top_k_continuations(b, context, k).entries;
      },
      py::arg("backend"), py::arg("context"), py::arg("k") = 10);

  // Stimuli.
  m.def(
      "generate_low_context",
      [](const std::filesystem::path& pools, std::size_t n, std::uint64_t seed, const std::string& variant,
         std::optional<std::filesystem::path> frequency_table) {
        GenerationSpec g{pools, n, seed, parse_variant(variant), std::move(frequency_table)};
        return serialize_low_context(generate_low_context(g));
      },
      py::arg("pools"), py::arg("n") = kDatasetSize, py::arg("seed"), py::arg("variant") = "base",
      py::arg("frequency_table") = py::none(),
      "Synthesizes a dataset and returns it as JSONL text (header line first).");
  m.def(
      "validate_item", [](const py::dict& item) { validate_item(item_from_json(from_py(item))); },
      py::arg("item"));
  m.def(
      "match_frequencies",
      [](const std::vector<std::string>& nouns, const std::vector<std::string>& humans,
         const std::map<std::string, std::uint64_t>& counts, const std::set<std::string>& exclude) {
        FrequencyTable t;
        for (const auto& [w, c] : counts) t.counts[w] = c;
        t.source = "python";
        const auto r = match_frequencies(nouns, humans, t, exclude);
        py::dict d;
        d["assignment"] = r.assignment;
        d["ratio"] = r.ratio;
        d["excluded"] = r.excluded;
        d["missing_candidates"] = r.missing_candidates;
        d["min_ratio"] = r.min_ratio;
        d["max_ratio"] = r.max_ratio;
        return d;
      },
      py::arg("nouns"), py::arg("humans"), py::arg("counts"),
      py::arg("exclude") = std::set<std::string>{"well"});

  // Statistics.
  m.def(
      "wilcoxon_signed_rank",
      [](const std::vector<double>& x, const std::vector<double>& y) { return test_dict(wilcoxon_signed_rank(x, y)); },
      py::arg("x"), py::arg("y"));
  m.def(
      "welch_t_test",
      [](const std::vector<double>& a, const std::vector<double>& b) { return test_dict(welch_t_test(a, b)); },
      py::arg("a"), py::arg("b"));
  m.def(
      "oneway_f_test",
      [](const std::vector<std::vector<double>>& groups) { return test_dict(oneway_f_test(groups)); },
      py::arg("groups"));
  m.def(
      "mean_ci",
      [](const std::vector<double>& v, double level) {
        const auto ci = mean_ci(v, level);
        return py::make_tuple(ci.mean, ci.lo, ci.hi);
      },
      py::arg("values"), py::arg("level") = 0.95);

  // Experiments.
  m.def(
      "run",
      [](const std::filesystem::path& config_path) {
        const auto config = resolve_experiment_config(Config::load(config_path));
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_pipeline(config);
        }
        py::dict d;
        d["experiment"] = r.summary.experiment;
        d["units"] = r.summary.units;
        d["scored"] = r.summary.scored;
        d["reused"] = r.summary.reused;
        d["failed"] = r.summary.failed;
        d["skipped"] = r.summary.skipped;
        d["threshold_exceeded"] = r.threshold_exceeded;
        d["output_dir"] = config.output_dir.string();
        return d;
      },
      py::arg("config_path"));
  m.def(
      "analyze", [](const std::filesystem::path& dir) { return to_py(analyze_run(dir).report); }, py::arg("dir"));
  m.def(
      "report",
      [](const std::filesystem::path& dir) {
        emit_report(dir, analyze_run(dir));
      },
      py::arg("dir"));
  m.def(
      "verify",
      [](const std::filesystem::path& dir, double tolerance) {
        const auto r = verify_run(dir, tolerance);
        py::dict d;
        d["ok"] = r.ok;
        d["mismatches"] = r.mismatches;
        d["values_checked"] = r.values_checked;
        d["files_checked"] = r.files_checked;
        return d;
      },
      py::arg("dir"), py::arg("tolerance") = 1e-9);

  m.attr("ENV_BACKEND_URL") = kEnvBackendUrl;
  m.attr("ENV_WORKERS") = kEnvWorkers;
  m.attr("__version__") = "0.1.0";
}

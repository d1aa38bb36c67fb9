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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "animacy/digest.hpp"
#include "animacy/error.hpp"
#include "animacy/experiments.hpp"
#include "animacy/scoring.hpp"
#include "animacy/stats.hpp"

namespace animacy {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Formatting

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_field(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return num(v.get<double>());
  const auto s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string render_csv(const std::vector<std::string>& columns, const ordered_json& rows) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ',';
      auto it = row.find(columns[i]);
      if (it != row.end()) out += csv_field(*it);
    }
    out += '\n';
  }
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Bar {
  std::string label;
  double value = 0.0;
  std::optional<double> lo, hi;
  std::string group;  // bars in the same group share a fill colour
};

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string render_bar_chart(const std::string& title, const std::string& y_label,
                             const std::vector<Bar>& bars) {
  static const char* kPalette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"};
  std::map<std::string, std::size_t> colour;
  for (const auto& b : bars) colour.emplace(b.group, colour.size());

  const double width = 80.0 + 70.0 * static_cast<double>(std::max<std::size_t>(bars.size(), 1));
  const double height = 360.0, top = 40.0, bottom = 300.0, left = 60.0;
  double ymax = 0.0;
  for (const auto& b : bars) ymax = std::max({ymax, b.value, b.hi.value_or(0.0)});
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.1;
  auto y = [&](double v) { return bottom - (std::max(v, 0.0) / ymax) * (bottom - top); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(width) << "\" height=\""
    << fixed2(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "  <text x=\"" << fixed2(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << xml_escape(title) << "</text>\n";
  s << "  <line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(bottom) << "\" x2=\"" << fixed2(width - 10)
    << "\" y2=\"" << fixed2(bottom) << "\" stroke=\"#000\"/>\n";
  s << "  <line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top) << "\" x2=\"" << fixed2(left)
    << "\" y2=\"" << fixed2(bottom) << "\" stroke=\"#000\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = ymax * t / 4.0;
    s << "  <text x=\"" << fixed2(left - 5) << "\" y=\"" << fixed2(y(v) + 4)
      << "\" text-anchor=\"end\">" << fixed2(v) << "</text>\n";
  }
  s << "  <text x=\"15\" y=\"" << fixed2((top + bottom) / 2) << "\" transform=\"rotate(-90 15 "
    << fixed2((top + bottom) / 2) << ")\" text-anchor=\"middle\">" << xml_escape(y_label) << "</text>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const double x = left + 20.0 + 70.0 * static_cast<double>(i);
    const double yv = y(b.value);
    s << "  <rect x=\"" << fixed2(x) << "\" y=\"" << fixed2(yv) << "\" width=\"40.00\" height=\""
      << fixed2(bottom - yv) << "\" fill=\"" << kPalette[colour[b.group] % 6] << "\"/>\n";
    if (b.lo && b.hi) {
      const double cx = x + 20.0;
      s << "  <line x1=\"" << fixed2(cx) << "\" y1=\"" << fixed2(y(*b.lo)) << "\" x2=\"" << fixed2(cx)
        << "\" y2=\"" << fixed2(y(*b.hi)) << "\" stroke=\"#000\"/>\n";
      for (double e : {*b.lo, *b.hi}) {
        s << "  <line x1=\"" << fixed2(cx - 6) << "\" y1=\"" << fixed2(y(e)) << "\" x2=\"" << fixed2(cx + 6)
          << "\" y2=\"" << fixed2(y(e)) << "\" stroke=\"#000\"/>\n";
      }
    }
    s << "  <text x=\"" << fixed2(x + 20) << "\" y=\"" << fixed2(bottom + 14)
      << "\" text-anchor=\"middle\">" << xml_escape(b.label) << "</text>\n";
    if (!b.group.empty()) {
      s << "  <text x=\"" << fixed2(x + 20) << "\" y=\"" << fixed2(bottom + 28)
        << "\" text-anchor=\"middle\" fill=\"#555\">" << xml_escape(b.group) << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

Bar bar_from_cell(const std::string& label, const std::string& group, const ordered_json& cell,
                  const char* mean_key) {
  Bar b;
  b.label = label;
  b.group = group;
  b.value = cell[mean_key].is_null() ? 0.0 : cell[mean_key].get<double>();
  if (!cell["ci_lo"].is_null()) {
    b.lo = cell["ci_lo"].get<double>();
    b.hi = cell["ci_hi"].get<double>();
  }
  return b;
}

// ---------------------------------------------------------------------------
// Aggregation helpers

void put_summary(ordered_json& row, const std::vector<double>& v, double level, const char* mean_key) {
  row["n"] = v.size();
  if (v.empty()) {
    row[mean_key] = nullptr;
  } else {
    row[mean_key] = mean(v);
  }
  if (v.size() >= 2) {
    const auto ci = mean_ci(v, level);
    row["ci_lo"] = ci.lo;
    row["ci_hi"] = ci.hi;
  } else {
    row["ci_lo"] = nullptr;
    row["ci_hi"] = nullptr;
  }
}

ordered_json run_test(const std::string& label, const std::string& name,
                      const std::function<TestResult()>& fn) {
  ordered_json j = {{"label", label}};
  try {
    const auto result = to_json(fn());
    for (const auto& [k, v] : result.items()) j[k] = v;
    j["degenerate"] = false;
  } catch (const DegenerateInputError& e) {
    j["test_name"] = name;
    j["degenerate"] = true;
    j["error"] = e.what();
  } catch (const ValidationError& e) {
    j["test_name"] = name;
    j["degenerate"] = true;
    j["error"] = e.what();
  }
  return j;
}

std::vector<ordered_json> read_rows(const fs::path& path) {
  std::vector<ordered_json> rows;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing result file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      rows.push_back(ordered_json::parse(line));
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

ordered_json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing file " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

double as_double(const ordered_json& j, const char* key) { return j.at(key).get<double>(); }

// ---------------------------------------------------------------------------
// Per-experiment analyses

void analyze_typical(const fs::path& dir, double level, Analysis& a) {
  const auto rows = read_rows(dir / run_files::kOutcomes);
  std::map<std::string, std::vector<double>> correct;
  std::vector<double> all;
  for (const auto& r : rows) {
    const double c = r.at("correct").get<bool>() ? 1.0 : 0.0;
    correct[r.at("dataset").get<std::string>()].push_back(c);
    all.push_back(c);
  }
  ordered_json datasets = ordered_json::array();
  std::vector<Bar> bars;
  for (const auto& name : {"animate_transitive", "animate_passive"}) {
    auto it = correct.find(name);
    if (it == correct.end()) continue;
    const double human = std::string(name) == "animate_transitive" ? kHumanAccuracyTransitive
                                                                   : kHumanAccuracyPassive;
    ordered_json row = {{"dataset", name}};
    put_summary(row, it->second, level, "accuracy");
    row["correct"] = static_cast<std::size_t>(std::count(it->second.begin(), it->second.end(), 1.0));
    row["human_accuracy"] = human;
    row["at_or_above_human"] = row["accuracy"].get<double>() >= human;
    bars.push_back(bar_from_cell(name, "model", row, "accuracy"));
    datasets.push_back(std::move(row));
  }
  ordered_json overall = {{"dataset", "all"}};
  put_summary(overall, all, level, "accuracy");
  overall["correct"] = static_cast<std::size_t>(std::count(all.begin(), all.end(), 1.0));

  a.report["datasets"] = datasets;
  a.report["overall"] = overall;
  a.tests = ordered_json::array();
  ordered_json table = datasets;
  table.push_back(overall);
  a.tables["summary.csv"] =
      render_csv({"dataset", "n", "correct", "accuracy", "ci_lo", "ci_hi", "human_accuracy"}, table);
  a.charts["accuracy.svg"] = render_bar_chart("Minimal-pair accuracy", "accuracy", bars);
}

void analyze_stories(const fs::path& dir, ExperimentKind kind, double level, Analysis& a) {
  const auto exp = story_experiment(kind);
  const auto rows = read_rows(dir / run_files::kSurprisals);
  std::vector<std::string> labels = expected_span_labels(exp);
  const bool baseline = exp == StoryExperiment::context || exp == StoryExperiment::context_en;
  if (baseline) {
    const auto base = labels.front();
    labels.push_back(base + std::string(kBaselineLabelSuffix));
  }

  // values[label][condition][story] = surprisal
  std::map<std::string, std::map<std::string, std::map<std::string, double>>> values;
  for (const auto& r : rows) {
    values[r.at("span_label").get<std::string>()][r.at("condition").get<std::string>()]
          [r.at("stimulus_id").get<std::string>()] = as_double(r, "surprisal_bits");
  }
  auto column = [&](const std::string& label, const char* cond) {
    std::vector<double> v;
    for (const auto& [id, s] : values[label][cond]) v.push_back(s);
    return v;
  };
  auto paired = [&](const std::string& label) {
    std::pair<std::vector<double>, std::vector<double>> p;
    const auto& an = values[label]["animate"];
    const auto& in = values[label]["inanimate"];
    for (const auto& [id, s] : an) {
      if (auto it = in.find(id); it != in.end()) {
        p.first.push_back(s);
        p.second.push_back(it->second);
      }
    }
    return p;
  };

  ordered_json cells = ordered_json::array();
  std::map<std::string, double> means;
  std::vector<Bar> bars;
  for (const char* cond : {"animate", "inanimate"}) {
    for (const auto& label : labels) {
      ordered_json row = {{"condition", cond}, {"span_label", label}};
      put_summary(row, column(label, cond), level, "mean_surprisal_bits");
      if (!row["mean_surprisal_bits"].is_null()) {
        means[std::string(cond) + ":" + label] = row["mean_surprisal_bits"].get<double>();
      }
      bars.push_back(bar_from_cell(label, cond, row, "mean_surprisal_bits"));
      cells.push_back(std::move(row));
    }
  }

  ordered_json tests = ordered_json::array();
  for (const auto& label : labels) {
    auto [x, y] = paired(label);
    tests.push_back(run_test("animate_vs_inanimate:" + label, "wilcoxon_signed_rank",
                             [&] { return wilcoxon_signed_rank(x, y); }));
  }

  auto mean_of = [&](const std::string& key) -> std::optional<double> {
    auto it = means.find(key);
    if (it == means.end()) return std::nullopt;
    return it->second;
  };
  auto less = [&](const std::string& a_key, const std::string& b_key) -> ordered_json {
    auto x = mean_of(a_key), y = mean_of(b_key);
    if (!x || !y) return nullptr;
    return *x < *y;
  };

  ordered_json extra = ordered_json::object();
  ordered_json checks = ordered_json::object();
  switch (exp) {
    case StoryExperiment::repetition:
      checks["inanimate_T1_gt_animate_T1"] = less("animate:T1", "inanimate:T1");
      checks["inanimate_T3_lt_inanimate_T1"] = less("inanimate:T3", "inanimate:T1");
      checks["inanimate_T5_lt_inanimate_T1"] = less("inanimate:T5", "inanimate:T1");
      break;
    case StoryExperiment::adaptation: {
      ordered_json drops = ordered_json::object();
      for (const char* cond : {"animate", "inanimate"}) {
        std::vector<double> d;
        const auto& v1 = values["V1"][cond];
        const auto& v2 = values["V2"][cond];
        for (const auto& [id, s1] : v1) {
          if (auto it = v2.find(id); it != v2.end()) d.push_back(it->second - s1);
        }
        ordered_json row = {{"condition", cond}};
        put_summary(row, d, level, "mean_drop_bits");
        drops[cond] = row;
      }
      extra["drop_V2_minus_V1"] = drops;
      checks["inanimate_V1_gt_animate_V1"] = less("animate:V1", "inanimate:V1");
      checks["inanimate_V2_lt_inanimate_V1"] = less("inanimate:V2", "inanimate:V1");
      break;
    }
    case StoryExperiment::context:
    case StoryExperiment::context_en: {
      for (const auto& label : {labels[0], labels[1]}) {
        auto [x, y] = paired(label);
        std::size_t wins = 0;
        for (std::size_t i = 0; i < x.size(); ++i) wins += x[i] < y[i];
        extra[label == labels[0] ? "proportion_animate_preferred" : "proportion_animate_preferred_baseline"] =
            x.empty() ? ordered_json(nullptr) : ordered_json(static_cast<double>(wins) / static_cast<double>(x.size()));
      }
      checks["animate_adjective_less_surprising"] =
          less("animate:" + labels[0], "inanimate:" + labels[0]);
      checks["baseline_reversed"] = less("inanimate:" + labels[1], "animate:" + labels[1]);
      break;
    }
  }

  a.report["cells"] = cells;
  for (auto& [k, v] : extra.items()) a.report[k] = v;
  a.report["expectations"] = checks;
  a.tests = tests;
  a.tables["summary.csv"] =
      render_csv({"condition", "span_label", "n", "mean_surprisal_bits", "ci_lo", "ci_hi"}, cells);
  a.charts["surprisal.svg"] = render_bar_chart(std::string(to_string(exp)) + ": mean surprisal",
                                               "surprisal (bits)", bars);
}

void analyze_low_context(const fs::path& dir, const ordered_json& run, double level, Analysis& a) {
  const auto ds = load_low_context((dir / run_files::kDataset).string());
  std::map<std::string, const LowContextItem*> by_id;
  for (const auto& item : ds.items) by_id[item.item_id] = &item;

  struct Row {
    const LowContextItem* item;
    double ao, io, ai;
  };
  std::vector<Row> rows;
  for (const auto& r : read_rows(dir / run_files::kDivergences)) {
    const auto id = r.at("item_id").get<std::string>();
    auto it = by_id.find(id);
    if (it == by_id.end()) throw ValidationError("divergence record for unknown item '" + id + "'");
    rows.push_back({it->second, as_double(r, "d_AO_bits"), as_double(r, "d_IO_bits"), as_double(r, "d_AI_bits")});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.item->item_id < y.item->item_id; });

  // (a) means with CIs.
  std::vector<double> ao, io, ai;
  for (const auto& r : rows) {
    ao.push_back(r.ao);
    io.push_back(r.io);
    ai.push_back(r.ai);
  }
  ordered_json means = ordered_json::array();
  std::vector<Bar> bars;
  for (const auto& [name, v] : {std::pair{"d_AO", &ao}, {"d_IO", &io}, {"d_AI", &ai}}) {
    ordered_json row = {{"divergence", name}};
    put_summary(row, *v, level, "mean_bits");
    bars.push_back(bar_from_cell(name, name, row, "mean_bits"));
    means.push_back(std::move(row));
  }

  // (b) factor analysis of d_AO.
  ordered_json factors = ordered_json::array();
  ordered_json tests = ordered_json::array();
  auto split = [&](const std::function<std::string(const LowContextItem&)>& key) {
    std::map<std::string, std::vector<double>> groups;
    for (const auto& r : rows) groups[key(*r.item)].push_back(r.ao);
    return groups;
  };
  auto add_levels = [&](const std::string& factor, const std::vector<std::string>& levels,
                        std::map<std::string, std::vector<double>>& groups) {
    for (const auto& level_name : levels) {
      ordered_json row = {{"factor", factor}, {"level", level_name}};
      put_summary(row, groups[level_name], level, "mean_d_AO_bits");
      factors.push_back(std::move(row));
    }
  };
  auto welch = [&](const std::string& label, const std::vector<double>& x, const std::vector<double>& y) {
    tests.push_back(run_test(label, "welch_t_test", [&] { return welch_t_test(x, y); }));
  };

  auto by_prompt = split([](const LowContextItem& i) { return std::string(to_string(i.prompt_type)); });
  add_levels("prompt_type", {"verb_eliciting", "adjective_eliciting"}, by_prompt);
  welch("prompt_type:verb_eliciting_vs_adjective_eliciting", by_prompt["verb_eliciting"],
        by_prompt["adjective_eliciting"]);

  auto by_template = split([](const LowContextItem& i) { return i.prompt_template; });
  std::vector<std::string> templates;
  for (const auto& [t, v] : by_template) templates.push_back(t);
  add_levels("prompt_template", templates, by_template);

  auto by_category = split([](const LowContextItem& i) { return std::string(to_string(i.verb_category)); });
  add_levels("verb_category", {"psychological", "physical"}, by_category);
  welch("verb_category:psychological_vs_physical", by_category["psychological"], by_category["physical"]);

  auto by_band = split([](const LowContextItem& i) { return std::string(to_string(i.cooccurrence_band)); });
  const std::vector<std::string> bands{"high", "high_mid", "mid"};
  add_levels("cooccurrence_band", bands, by_band);
  tests.push_back(run_test("cooccurrence_band:all", "oneway_f_test", [&] {
    std::vector<std::vector<double>> groups;
    for (const auto& b : bands) groups.push_back(by_band[b]);
    return oneway_f_test(groups);
  }));
  for (std::size_t i = 0; i < bands.size(); ++i) {
    for (std::size_t j = i + 1; j < bands.size(); ++j) {
      welch("cooccurrence_band:" + bands[i] + "_vs_" + bands[j], by_band[bands[i]], by_band[bands[j]]);
    }
  }

  // (c) per-verb and per-noun means.
  std::map<std::string, std::vector<double>> per_verb_vals, per_noun_vals;
  std::map<std::string, const LowContextItem*> verb_meta;
  for (const auto& r : rows) {
    per_verb_vals[r.item->verb].push_back(r.ao);
    per_noun_vals[r.item->noun].push_back(r.ao);
    verb_meta.emplace(r.item->verb, r.item);
  }
  ordered_json per_verb = ordered_json::array();
  for (const auto& [verb, v] : per_verb_vals) {
    per_verb.push_back({{"verb", verb},
                        {"verb_category", to_string(verb_meta[verb]->verb_category)},
                        {"cooccurrence_band", to_string(verb_meta[verb]->cooccurrence_band)},
                        {"n", v.size()},
                        {"mean_d_AO_bits", mean(v)}});
  }
  ordered_json per_noun = ordered_json::array();
  for (const auto& [noun, v] : per_noun_vals) {
    per_noun.push_back({{"noun", noun}, {"n", v.size()}, {"mean_d_AO_bits", mean(v)}});
  }

  // (d) divergence-ranked top-k continuations at the configured ranks.
  std::vector<const Row*> ranked;
  for (const auto& r : rows) ranked.push_back(&r);
  std::sort(ranked.begin(), ranked.end(), [](const Row* x, const Row* y) {
    if (x->ao != y->ao) return x->ao < y->ao;
    return x->item->item_id < y->item->item_id;
  });
  std::map<std::string, std::map<std::string, ordered_json>> topk;
  for (auto& r : read_rows(dir / run_files::kTopk)) {
    topk[r.at("item_id").get<std::string>()][r.at("reference").get<std::string>()] = r;
  }
  std::set<std::size_t> chosen;
  for (const auto& rank : run.at("topk_ranks")) {
    const long long r = rank.get<long long>();
    const long long n = static_cast<long long>(ranked.size());
    const long long pos = r > 0 ? r - 1 : n + r;
    if (pos >= 0 && pos < n) chosen.insert(static_cast<std::size_t>(pos));
  }
  ordered_json topk_rows = ordered_json::array();
  ordered_json table4 = ordered_json::array();
  for (auto pos : chosen) {
    const Row& r = *ranked[pos];
    ordered_json entry = {{"rank", pos + 1},
                          {"item_id", r.item->item_id},
                          {"sentence_O", r.item->sentence_O},
                          {"d_AO_bits", r.ao}};
    for (const char* ref : {"O", "I", "A"}) {
      const auto& t = topk[r.item->item_id][ref];
      if (t.is_null()) continue;
      entry[std::string("top_") + ref] = t.at("tokens");
      for (std::size_t k = 0; k < t.at("tokens").size(); ++k) {
        topk_rows.push_back({{"rank", pos + 1},
                             {"item_id", r.item->item_id},
                             {"d_AO_bits", r.ao},
                             {"reference", ref},
                             {"position", k + 1},
                             {"token", t.at("tokens")[k]},
                             {"probability", t.at("probabilities")[k]}});
      }
    }
    table4.push_back(std::move(entry));
  }

  ordered_json per_item = ordered_json::array();
  for (const auto& r : rows) {
    const auto& i = *r.item;
    per_item.push_back({{"item_id", i.item_id},
                        {"prompt_template", i.prompt_template},
                        {"prompt_type", to_string(i.prompt_type)},
                        {"noun", i.noun},
                        {"verb", i.verb},
                        {"verb_category", to_string(i.verb_category)},
                        {"cooccurrence_band", to_string(i.cooccurrence_band)},
                        {"human_entity", i.human_entity},
                        {"d_AO_bits", r.ao},
                        {"d_IO_bits", r.io},
                        {"d_AI_bits", r.ai}});
  }

  ordered_json checks = ordered_json::object();
  if (!rows.empty()) checks["d_AI_gt_d_AO"] = mean(ai) > mean(ao);

  a.report["dataset_header"] = to_json(ds.header);
  a.report["means"] = means;
  a.report["factors"] = factors;
  a.report["per_verb"] = per_verb;
  a.report["per_noun"] = per_noun;
  a.report["ranked_examples"] = table4;
  a.report["expectations"] = checks;
  a.tests = tests;

  a.tables["summary.csv"] = render_csv({"divergence", "n", "mean_bits", "ci_lo", "ci_hi"}, means);
  a.tables["divergences.csv"] =
      render_csv({"item_id", "prompt_template", "prompt_type", "noun", "verb", "verb_category",
                  "cooccurrence_band", "human_entity", "d_AO_bits", "d_IO_bits", "d_AI_bits"},
                 per_item);
  a.tables["factors.csv"] = render_csv({"factor", "level", "n", "mean_d_AO_bits", "ci_lo", "ci_hi"}, factors);
  a.tables["per_verb.csv"] =
      render_csv({"verb", "verb_category", "cooccurrence_band", "n", "mean_d_AO_bits"}, per_verb);
  a.tables["per_noun.csv"] = render_csv({"noun", "n", "mean_d_AO_bits"}, per_noun);
  a.tables["topk.csv"] = render_csv(
      {"rank", "item_id", "d_AO_bits", "reference", "position", "token", "probability"}, topk_rows);
  a.charts["divergences.svg"] = render_bar_chart("Mean KL divergence", "KL (bits)", bars);

  std::vector<Bar> factor_bars;
  for (const auto& f : factors) {
    if (f["factor"] == "prompt_template") continue;
    factor_bars.push_back(bar_from_cell(f["level"].get<std::string>(), f["factor"].get<std::string>(), f,
                                        "mean_d_AO_bits"));
  }
  a.charts["factors.svg"] = render_bar_chart("Animacy divergence by factor", "d_AO (bits)", factor_bars);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------
// Verification

bool close_enough(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

void compare_json(const json& want, const json& got, const std::string& where, double tol, VerifyReport& r) {
  if (want.is_number() && got.is_number()) {
    ++r.values_checked;
    if (!close_enough(want.get<double>(), got.get<double>(), tol)) {
      r.mismatches.push_back(where + ": recomputed " + num(want.get<double>()) + ", stored " +
                             num(got.get<double>()));
    }
    return;
  }
  if (want.type() != got.type()) {
    r.mismatches.push_back(where + ": type differs");
    return;
  }
  if (want.is_object()) {
    for (const auto& [k, v] : want.items()) {
      if (!got.contains(k)) {
        r.mismatches.push_back(where + "." + k + ": missing");
        continue;
      }
      compare_json(v, got[k], where + "." + k, tol, r);
    }
    for (const auto& [k, v] : got.items()) {
      if (!want.contains(k)) r.mismatches.push_back(where + "." + k + ": unexpected");
    }
  } else if (want.is_array()) {
    if (want.size() != got.size()) {
      r.mismatches.push_back(where + ": length " + std::to_string(got.size()) + ", expected " +
                             std::to_string(want.size()));
      return;
    }
    for (std::size_t i = 0; i < want.size(); ++i) {
      compare_json(want[i], got[i], where + "[" + std::to_string(i) + "]", tol, r);
    }
  } else {
    ++r.values_checked;
    if (want != got) r.mismatches.push_back(where + ": recomputed " + want.dump() + ", stored " + got.dump());
  }
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
    } else {
      field += c;
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

std::optional<double> as_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

void compare_csv(const std::string& name, const std::string& want, const std::string& got, double tol,
                 VerifyReport& r) {
  const auto a = parse_csv(want), b = parse_csv(got);
  if (a.size() != b.size()) {
    r.mismatches.push_back(name + ": " + std::to_string(b.size()) + " rows, expected " + std::to_string(a.size()));
    return;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) {
      r.mismatches.push_back(name + ": row " + std::to_string(i) + " has a different column count");
      continue;
    }
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      ++r.values_checked;
      const auto x = as_number(a[i][j]), y = as_number(b[i][j]);
      const bool same = x && y ? close_enough(*x, *y, tol) : a[i][j] == b[i][j];
      if (!same) {
        r.mismatches.push_back(name + ": row " + std::to_string(i) + " column " + std::to_string(j) +
                               ": recomputed '" + a[i][j] + "', stored '" + b[i][j] + "'");
      }
    }
  }
}

}  // namespace

Analysis analyze_run(const fs::path& dir) {
  const auto run = read_json_file(dir / run_files::kRun);
  const auto kind = parse_experiment_kind(run.at("experiment").get<std::string>());
  const double level = run.at("ci_level").get<double>();
  Analysis a;
  a.report = {{"experiment", to_string(kind)},
              {"ci_level", level},
              {"significance_level", kSignificanceLevel},
              {"dataset_sha256", run.at("dataset_sha256")},
              {"units", run.at("units")},
              {"failed", run.at("failed")}};
  switch (kind) {
    case ExperimentKind::typical_animacy: analyze_typical(dir, level, a); break;
    case ExperimentKind::low_context: analyze_low_context(dir, run, level, a); break;
    default: analyze_stories(dir, kind, level, a); break;
  }
  a.report["tests"] = a.tests;
  return a;
}

void write_analysis(const fs::path& dir, const Analysis& a) {
  write_file(dir / run_files::kReport, a.report.dump(2) + "\n");
  write_file(dir / run_files::kTests, a.tests.dump(2) + "\n");
}

void write_tables(const fs::path& dir, const Analysis& a) {
  for (const auto& [name, text] : a.tables) write_file(dir / name, text);
  for (const auto& [name, text] : a.charts) write_file(dir / name, text);
}

void emit_report(const fs::path& dir, const Analysis& a) {
  if (!fs::is_directory(dir)) throw Error("output directory does not exist: " + dir.string());
  write_analysis(dir, a);
  write_tables(dir, a);
}

VerifyReport verify_run(const fs::path& dir, double tol) {
  VerifyReport r;
  const auto recomputed = analyze_run(dir);
  compare_json(recomputed.report, read_json_file(dir / run_files::kReport), "report", tol, r);
  compare_json(recomputed.tests, read_json_file(dir / run_files::kTests), "tests", tol, r);
  for (const auto& [name, text] : recomputed.tables) {
    if (!fs::exists(dir / name)) {
      r.mismatches.push_back(name + ": missing");
      continue;
    }
    compare_csv(name, text, read_file(dir / name), tol, r);
  }
  for (const auto& [name, text] : recomputed.charts) {
    if (!fs::exists(dir / name)) r.mismatches.push_back(name + ": missing");
  }

  const auto manifest_path = dir / run_files::kManifest;
  if (!fs::exists(manifest_path)) {
    r.mismatches.push_back("manifest.json: missing");
  } else {
    const auto manifest = read_json_file(manifest_path);
    for (const auto& [name, digest] : manifest.at("files").items()) {
      ++r.files_checked;
      const auto path = dir / name;
      if (!fs::exists(path)) {
        r.mismatches.push_back(name + ": listed in manifest but missing");
      } else if (file_sha256(path.string()) != digest.get<std::string>()) {
        r.mismatches.push_back(name + ": digest does not match manifest");
      }
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto name = entry.path().filename().string();
      if (entry.is_regular_file() && name != run_files::kManifest && !manifest.at("files").contains(name)) {
        r.mismatches.push_back(name + ": not covered by the manifest");
      }
    }
  }
  r.ok = r.mismatches.empty();
  return r;
}

}  // namespace animacy

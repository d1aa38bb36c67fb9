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

#include "animacy/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "animacy/error.hpp"
#include "animacy/special_functions.hpp"

namespace animacy {

nlohmann::ordered_json to_json(const TestResult& r) {
  nlohmann::ordered_json detail = {{"method", r.method_detail}, {"sizes", r.sizes}};
  if (!r.df.empty()) detail["df"] = r.df;
  return {{"test_name", r.test_name},
          {"statistic", r.statistic},
          {"p_value", r.p_value},
          {"significant", r.significant()},
          {"detail", std::move(detail)}};
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw ValidationError("variance needs at least 2 values");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size() - 1);
}

TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError("Wilcoxon signed-rank needs paired samples of equal length");
  }
  if (x.empty()) throw ValidationError("Wilcoxon signed-rank needs at least one pair");

  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    if (diff != 0.0) d.push_back(diff);
  }
  const std::size_t m = d.size();
  if (m == 0) throw DegenerateInputError("all zero differences");

  // Average ranks of |d|, kept doubled so tied ranks stay integral.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });
  std::vector<long long> rank2(m);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    while (j + 1 < m && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const auto doubled = static_cast<long long>(i + 1 + j + 1);  // 2 * average of ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = doubled;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  long long w2 = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (d[i] > 0) w2 += rank2[i];
  }

  TestResult r;
  r.test_name = "wilcoxon_signed_rank";
  r.statistic = 0.5 * static_cast<double>(w2);
  r.sizes = {x.size(), m};

  if (m <= kWilcoxonExactLimit) {
    // counts[s] = number of sign patterns whose doubled W+ equals s.
    long long total2 = 0;
    for (auto v : rank2) total2 += v;
    std::vector<double> counts(static_cast<std::size_t>(total2) + 1, 0.0);
    counts[0] = 1.0;
    long long reach = 0;
    for (auto v : rank2) {
      for (long long s = reach; s >= 0; --s) {
        if (counts[static_cast<std::size_t>(s)] != 0.0) {
          counts[static_cast<std::size_t>(s + v)] += counts[static_cast<std::size_t>(s)];
        }
      }
      reach += v;
    }
    double lower = 0.0;
    double upper = 0.0;
    for (long long s = 0; s <= total2; ++s) {
      const double c = counts[static_cast<std::size_t>(s)];
      if (s <= w2) lower += c;
      if (s >= w2) upper += c;
    }
    const double patterns = std::ldexp(1.0, static_cast<int>(m));
    r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / patterns);
    r.method_detail = "exact null distribution over 2^" + std::to_string(m) + " sign patterns";
  } else {
    const double md = static_cast<double>(m);
    const double mu = md * (md + 1.0) / 4.0;
    const double var = md * (md + 1.0) * (2.0 * md + 1.0) / 24.0 - tie_term / 48.0;
    const double dev = std::abs(r.statistic - mu) - 0.5;
    const double z = dev <= 0.0 ? 0.0 : dev / std::sqrt(var);
    r.p_value = std::min(1.0, 2.0 * special::normal_cdf(-z));
    std::ostringstream detail;
    detail.precision(17);
    detail << "normal approximation with tie and continuity correction, z=" << z;
    r.method_detail = detail.str();
  }
  return r;
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw ValidationError("Welch t-test needs at least 2 observations per sample");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = sample_variance(a) / na;
  const double vb = sample_variance(b) / nb;
  const double se2 = va + vb;
  if (!(se2 > 0.0)) throw DegenerateInputError("both samples have zero variance");
  TestResult r;
  r.test_name = "welch_t_test";
  r.statistic = (mean(a) - mean(b)) / std::sqrt(se2);
  const double df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.df = {df};
  r.p_value = special::student_t_two_sided(r.statistic, df);
  r.sizes = {a.size(), b.size()};
  r.method_detail = "Welch unequal-variance t, Welch-Satterthwaite df, two-sided";
  return r;
}

TestResult oneway_f_test(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw ValidationError("F-test needs at least 2 groups");
  double grand = 0.0;
  std::size_t total = 0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw ValidationError("F-test needs at least 2 observations per group");
    grand += std::accumulate(g.begin(), g.end(), 0.0);
    total += g.size();
  }
  grand /= static_cast<double>(total);
  double ss_between = 0.0;
  double ss_within = 0.0;
  TestResult r;
  for (const auto& g : groups) {
    const double m = mean(g);
    ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) ss_within += (v - m) * (v - m);
    r.sizes.push_back(g.size());
  }
  const double df1 = static_cast<double>(groups.size() - 1);
  const double df2 = static_cast<double>(total - groups.size());
  r.test_name = "oneway_f_test";
  r.df = {df1, df2};
  r.method_detail = "one-way ANOVA F = MS_between / MS_within";
  if (ss_within == 0.0) {
    if (ss_between != 0.0) {
      throw DegenerateInputError("zero within-group variance with unequal group means");
    }
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  r.statistic = (ss_between / df1) / (ss_within / df2);
  r.p_value = special::f_sf(r.statistic, df1, df2);
  return r;
}

MeanCI mean_ci(std::span<const double> values, double level) {
  if (values.size() < 2) throw ValidationError("confidence interval needs at least 2 values");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("CI level must lie in (0, 1)");
  const double m = mean(values);
  const double z = special::normal_quantile(0.5 + 0.5 * level);
  const double half = z * std::sqrt(sample_variance(values) / static_cast<double>(values.size()));
  return {m, m - half, m + half};
}

}  // namespace animacy

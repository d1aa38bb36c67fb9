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
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace animacy {

inline constexpr double kSignificanceLevel = 0.01;
inline constexpr std::size_t kWilcoxonExactLimit = 20;

struct TestResult {
  std::string test_name;
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<std::size_t> sizes;  // n per sample (Wilcoxon: pairs, nonzero differences)
  std::vector<double> df;          // degrees of freedom when applicable
  std::string method_detail;

  bool significant(double level = kSignificanceLevel) const { return p_value < level; }
};

nlohmann::ordered_json to_json(const TestResult& r);

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// d = x - y, zeros dropped, |d| ranked with average ranks for ties.
/// statistic = W+ (sum of ranks of positive differences). m <= 20 nonzero
/// differences: exact null distribution over all 2^m sign patterns.
/// Otherwise: normal approximation with tie and continuity correction.
///
/// Throws ValidationError on length mismatch or empty input and
/// DegenerateInputError when every difference is zero.
TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

/// Welch's unequal-variance two-sample t-test, two-sided.
/// Throws DegenerateInputError when both samples have zero variance.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Classic one-way ANOVA. Zero within-group variance with equal means gives
/// F = 0, p = 1; with unequal means it throws DegenerateInputError.
TestResult oneway_f_test(const std::vector<std::vector<double>>& groups);

struct MeanCI {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Normal-approximation interval mean +- z(level) * s / sqrt(n); n >= 2.
MeanCI mean_ci(std::span<const double> values, double level = 0.95);

double mean(std::span<const double> values);
double sample_variance(std::span<const double> values);

}  // namespace animacy

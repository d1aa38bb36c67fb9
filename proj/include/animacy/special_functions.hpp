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

namespace animacy::special {

// log Gamma(x) for x > 0 (Lanczos, g = 7). Reentrant, unlike std::lgamma
// on some C libraries.
double log_gamma(double x);

// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz).
double incomplete_beta(double a, double b, double x);

double normal_cdf(double z);
// Inverse of normal_cdf for p in (0, 1).
double normal_quantile(double p);

double student_t_cdf(double t, double df);
// P(|T| >= |t|).
double student_t_two_sided(double t, double df);

double f_cdf(double f, double df1, double df2);
// P(F >= f).
double f_sf(double f, double df1, double df2);

}  // namespace animacy::special

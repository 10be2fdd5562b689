// Copyright 2026 The Stance Authors
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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace stance::stats {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / M_SQRT2); }

// One-sided Mann-Whitney rank-sum test with midranks and tie correction.
// Returns the p-value for the alternative "a tends to be larger than b".
inline double rank_sum_p_greater(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  const size_t n1 = a.size(), n2 = b.size();
  std::vector<std::pair<double, int>> pooled;  // value, group
  pooled.reserve(n1 + n2);
  for (double v : a) pooled.push_back({v, 0});
  for (double v : b) pooled.push_back({v, 1});
  std::sort(pooled.begin(), pooled.end());

  const size_t n = pooled.size();
  std::vector<double> rank(n);
  double tie_term = 0.0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double mid = 0.5 * (i + j - 1) + 1.0;
    for (size_t k = i; k < j; ++k) rank[k] = mid;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  double rank_sum_a = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (pooled[i].second == 0) rank_sum_a += rank[i];
  }
  const double u = rank_sum_a - n1 * (n1 + 1) / 2.0;
  const double mean = 0.5 * n1 * n2;
  const double nn = static_cast<double>(n);
  double variance = n1 * n2 / 12.0 * (nn + 1.0 - tie_term / (nn * (nn - 1.0)));
  if (variance <= 0.0) return 0.5;  // all observations identical
  const double z = (u - mean - 0.5) / std::sqrt(variance);
  return 1.0 - normal_cdf(z);
}

// One-sided two-proportion z-test: p-value for "rate of successes_a/n_a
// exceeds rate of successes_b/n_b".
inline double proportion_p_greater(int successes_a, int n_a, int successes_b,
                                   int n_b) {
  const double p_a = static_cast<double>(successes_a) / n_a;
  const double p_b = static_cast<double>(successes_b) / n_b;
  const double pooled = static_cast<double>(successes_a + successes_b) /
                        (n_a + n_b);
  const double variance = pooled * (1.0 - pooled) * (1.0 / n_a + 1.0 / n_b);
  if (variance <= 0.0) return 0.5;
  const double z = (p_a - p_b) / std::sqrt(variance);
  return 1.0 - normal_cdf(z);
}

inline double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0
                   : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

}  // namespace stance::stats

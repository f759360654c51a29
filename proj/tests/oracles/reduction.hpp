/*
 Copyright 2026 The dsopf Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/


#ifndef DSOPF_TESTS_ORACLES_REDUCTION_HPP
#define DSOPF_TESTS_ORACLES_REDUCTION_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace dsopf::oracle {

// Kantorovich distance of keeping `kept` out of equiprobable-or-weighted
// vector scenarios, Euclidean ground metric.
inline double transport_cost(const std::vector<std::vector<double>>& pts,
                             const std::vector<double>& prob, const std::vector<int>& kept) {
  double total = 0.0;
  for (std::size_t w = 0; w < pts.size(); ++w) {
    bool in = false;
    for (int k : kept) in = in || static_cast<std::size_t>(k) == w;
    if (in) continue;
    double best = std::numeric_limits<double>::infinity();
    for (int k : kept) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < pts[w].size(); ++i) {
        const double diff = pts[w][i] - pts[k][i];
        d2 += diff * diff;
      }
      best = std::min(best, std::sqrt(d2));
    }
    total += prob[w] * best;
  }
  return total;
}

struct SubsetOptimum {
  std::vector<int> kept;
  double distance = std::numeric_limits<double>::infinity();
};

// Exhaustive search over all subsets of size m.
inline SubsetOptimum best_subset(const std::vector<std::vector<double>>& pts,
                                 const std::vector<double>& prob, std::size_t m) {
  SubsetOptimum best;
  const std::size_t n = pts.size();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> kept;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) kept.push_back(static_cast<int>(i));
    if (kept.size() != m) continue;
    const double d = transport_cost(pts, prob, kept);
    if (d < best.distance) {
      best.distance = d;
      best.kept = kept;
    }
  }
  return best;
}

}  // namespace dsopf::oracle

#endif  // DSOPF_TESTS_ORACLES_REDUCTION_HPP

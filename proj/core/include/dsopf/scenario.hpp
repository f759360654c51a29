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

#ifndef DSOPF_SCENARIO_HPP
#define DSOPF_SCENARIO_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dsopf/network.hpp"

namespace dsopf::scenario {

/// One joint PV realization. `w_mw[i]` is the real injection at node i.
struct Scenario {
  std::vector<double> w_mw;
  double probability = 0.0;
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  std::uint64_t seed = 0;
  /// Index of each scenario in the set it was reduced from; empty if unreduced.
  std::vector<std::size_t> source_index;

  std::size_t size() const { return scenarios.size(); }
  std::size_t node_count() const {
    return scenarios.empty() ? 0 : scenarios.front().w_mw.size();
  }
  double total_probability() const;
  double min_probability() const;
};

/// Throws BadParameter unless probabilities are >= 0, sum to 1 (1e-9) and
/// every scenario spans the same node domain.
void validate(const ScenarioSet& set);

struct BetaParams {
  double alpha = 0.0;
  double beta = 0.0;
  bool variance_clamped = false;
};

/// sigma / w_max = 0.2 * mean_ratio + 0.21. The variance is clamped to
/// 0.99 * m (1 - m) when the relation leaves the feasible beta range.
BetaParams beta_params_from_mean(double mean_ratio);

enum class Correlation {
  kIndependent,   // one beta draw per PV node
  kCommonFactor,  // one beta draw shared by all PV nodes
};

struct SamplingOptions {
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  Correlation correlation = Correlation::kIndependent;
};

/// w_max = s_w / 1.1 per node.
double max_injection_mw(const network::Network& net, int node);

/// Equiprobable scenarios; `mean_ratio` holds one global value or one per node.
ScenarioSet sample_scenarios(const network::Network& net,
                             std::span<const double> mean_ratio,
                             const SamplingOptions& options);
ScenarioSet sample_scenarios(const network::Network& net, double mean_ratio,
                             const SamplingOptions& options);

enum class Metric { kEuclidean, kL1 };

double scenario_distance(const Scenario& a, const Scenario& b,
                         Metric metric = Metric::kEuclidean);

/// Sum over dropped scenarios of pi * (distance to the nearest kept one).
double kantorovich_distance(const ScenarioSet& full, std::span<const std::size_t> kept,
                            Metric metric = Metric::kEuclidean);

struct Reduction {
  ScenarioSet reduced;
  /// Kept indices in selection order.
  std::vector<std::size_t> selection_order;
  /// Kantorovich distance after each greedy round.
  std::vector<double> distance_trace;
  double min_probability = 0.0;
};

/// Greedy fast-forward selection; dropped mass moves to the nearest kept
/// scenario (ties to the lower index). Kept scenarios are listed in their
/// original order.
Reduction fast_forward_reduce(const ScenarioSet& full, std::size_t target,
                              Metric metric = Metric::kEuclidean);

}  // namespace dsopf::scenario

#endif  // DSOPF_SCENARIO_HPP

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


#ifndef DSOPF_TESTS_SUPPORT_HPP
#define DSOPF_TESTS_SUPPORT_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "dsopf/network.hpp"
#include "dsopf/scenario.hpp"

namespace dsopf::testing {

struct ChainOptions {
  double r_ohm = 0.066;
  double x_ohm = 0.076;
  double l_max_ka2 = 0.5;
  double p_load_mw = 0.1;
  double pf = 0.94;
  double pc_max_mw = 0.05;
  double pv_mva = 0.1;
  double k_u = 1.0;
  double q_s = 0.0;
};

/// Nodes 0..n with ancestor(i) = parents[i - 1]; parents empty gives a chain.
inline network::Network tree(int n, const std::vector<int>& parents = {},
                             const ChainOptions& o = {}) {
  std::vector<network::NodeParams> nodes;
  std::vector<network::LineParams> lines;
  nodes.push_back({0, std::nullopt, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  for (int i = 1; i <= n; ++i) {
    const int a = parents.empty() ? i - 1 : parents[static_cast<std::size_t>(i - 1)];
    const double q = o.p_load_mw * std::sqrt(1.0 / (o.pf * o.pf) - 1.0);
    nodes.push_back({i, a, o.p_load_mw, q, o.pf, 0.0, o.pc_max_mw, o.pv_mva, o.q_s, o.k_u});
    lines.push_back({i, o.r_ohm, o.x_ohm, o.l_max_ka2});
  }
  return network::Network::build(nodes, lines, {});
}

/// Equiprobable set from per-scenario injection vectors (MW, node-indexed).
inline scenario::ScenarioSet scenario_set(const std::vector<std::vector<double>>& w,
                                          std::vector<double> probs = {}) {
  scenario::ScenarioSet set;
  for (std::size_t m = 0; m < w.size(); ++m)
    set.scenarios.push_back(
        {w[m], probs.empty() ? 1.0 / static_cast<double>(w.size()) : probs[m]});
  return set;
}

/// Scalar scenarios live on a one-node domain.
inline scenario::ScenarioSet scalar_set(const std::vector<double>& values) {
  std::vector<std::vector<double>> w;
  for (double v : values) w.push_back({v});
  return scenario_set(w);
}

}  // namespace dsopf::testing

#endif  // DSOPF_TESTS_SUPPORT_HPP

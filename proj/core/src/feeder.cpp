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

#include "dsopf/feeder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dsopf/error.hpp"

namespace dsopf::network {

Network make_feeder(const FeederSpec& spec) {
  if (spec.trunk_length < 1)
    throw Error(ErrorCode::kBadParameter, "trunk_length must be >= 1");
  if (!(spec.pv_fraction >= 0.0 && spec.pv_fraction <= 1.0))
    throw Error(ErrorCode::kBadParameter, "pv_fraction must lie in [0, 1]");

  std::vector<int> ancestor{-1};
  for (int i = 1; i <= spec.trunk_length; ++i) ancestor.push_back(i - 1);
  for (const auto& lat : spec.laterals) {
    if (lat.length < 1 || lat.branch_node < 0 ||
        lat.branch_node >= static_cast<int>(ancestor.size()))
      throw Error(ErrorCode::kBadParameter,
                  "lateral at node " + std::to_string(lat.branch_node) + " is invalid");
    int prev = lat.branch_node;
    for (int k = 0; k < lat.length; ++k) {
      ancestor.push_back(prev);
      prev = static_cast<int>(ancestor.size()) - 1;
    }
  }
  const int users = static_cast<int>(ancestor.size()) - 1;

  std::vector<double> s_w(ancestor.size(), 0.0);
  for (const auto& [node, cap] : spec.pv_overrides) {
    if (node < 1 || node > users)
      throw Error(ErrorCode::kBadParameter, "pv override for unknown node " + std::to_string(node));
    s_w[node] = cap;
  }
  if (spec.pv_fraction >= 1.0) {
    for (int i = 1; i <= users; ++i)
      if (!spec.pv_overrides.contains(i)) s_w[i] = spec.pv_capacity_mva;
  } else {
    const int wanted = static_cast<int>(std::lround(spec.pv_fraction * users));
    int have = static_cast<int>(spec.pv_overrides.size());
    std::vector<int> pool;
    for (int i = 1; i <= users; ++i)
      if (!spec.pv_overrides.contains(i)) pool.push_back(i);
    std::mt19937_64 rng(spec.seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int i : pool) {
      if (have >= wanted) break;
      s_w[i] = spec.pv_capacity_mva;
      ++have;
    }
  }

  const double tan_phi =
      std::sqrt(1.0 / (spec.power_factor * spec.power_factor) - 1.0);
  std::vector<NodeParams> nodes;
  std::vector<LineParams> lines;
  nodes.push_back(NodeParams{0, std::nullopt, 0, 0, 1.0, 0, 0, 0, 0, 0});
  for (int i = 1; i <= users; ++i) {
    NodeParams n;
    n.id = i;
    n.ancestor = ancestor[i];
    n.p_load_mw = spec.p_load_mw;
    n.q_load_mvar = spec.p_load_mw * tan_phi;
    n.power_factor = spec.power_factor;
    n.pc_max_mw = spec.pc_max_mw;
    n.pv_capacity_mva = s_w[i];
    n.shunt_q = spec.shunt_q;
    n.utility_weight = spec.utility_weight;
    nodes.push_back(n);
    lines.push_back(LineParams{i, spec.r_ohm_per_km * spec.spacing_km,
                               spec.x_ohm_per_km * spec.spacing_km, spec.l_max_ka2});
  }
  return Network::build(std::move(nodes), std::move(lines), spec.bases);
}

FeederSpec day_type_feeder() {
  FeederSpec spec;
  spec.pv_overrides = {{30, 1.0}};
  return spec;
}

FeederSpec local_control_feeder() {
  FeederSpec spec;
  spec.trunk_length = 60;
  spec.laterals = {{40, 20}, {40, 20}};
  spec.pv_capacity_mva = 0.4;
  spec.pv_fraction = 0.5;
  spec.pv_overrides = {{60, 1.0}};
  spec.seed = 1;
  return spec;
}

FeederSpec step_size_feeder() {
  FeederSpec spec;
  spec.pv_capacity_mva = 0.15;
  spec.pv_fraction = 0.5;
  spec.pv_overrides = {{50, 1.5}};
  spec.seed = 1;
  return spec;
}

}  // namespace dsopf::network

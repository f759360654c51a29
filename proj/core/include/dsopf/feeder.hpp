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

#ifndef DSOPF_FEEDER_HPP
#define DSOPF_FEEDER_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "dsopf/network.hpp"

namespace dsopf::network {

struct LateralSpec {
  int branch_node = 0;
  int length = 0;
};

// Parametric trunk-and-laterals feeder. Trunk nodes are numbered 1..trunk,
// lateral nodes follow in declaration order.
struct FeederSpec {
  int trunk_length = 30;
  std::vector<LateralSpec> laterals{{20, 10}, {20, 10}};
  double spacing_km = 0.2;
  double r_ohm_per_km = 0.33;
  double x_ohm_per_km = 0.38;
  double l_max_ka2 = 0.5;
  double p_load_mw = 0.1;
  double power_factor = 0.94;
  double pc_max_mw = 0.05;
  double utility_weight = 1.0;
  double shunt_q = 0.0;
  double pv_capacity_mva = 0.1;
  double pv_fraction = 1.0;  // < 1 selects PV nodes at random from `seed`
  std::map<int, double> pv_overrides;
  std::uint64_t seed = 0;
  Bases bases;
};

Network make_feeder(const FeederSpec& spec);

/// 50 users, 30-node trunk, two 10-node laterals at node 20, all PV,
/// 1 MVA unit at the trunk end.
FeederSpec day_type_feeder();
/// 100 users, 60-node trunk, two 20-node laterals at node 40, half PV.
FeederSpec local_control_feeder();
/// Day-type topology with half the users on 0.15 MVA PV and 1.5 MVA at node 50.
FeederSpec step_size_feeder();

}  // namespace dsopf::network

#endif  // DSOPF_FEEDER_HPP

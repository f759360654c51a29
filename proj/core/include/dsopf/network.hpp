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

#ifndef DSOPF_NETWORK_HPP
#define DSOPF_NETWORK_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dsopf/units.hpp"

namespace dsopf::network {

/// User-side parameters of one node, physical units.
struct NodeParams {
  int id = 0;
  std::optional<int> ancestor;  // empty only for the substation (node 0)
  double p_load_mw = 0.0;
  double q_load_mvar = 0.0;
  double power_factor = 1.0;
  double pc_min_mw = 0.0;
  double pc_max_mw = 0.0;
  double pv_capacity_mva = 0.0;  // inverter apparent-power rating, 0 = no PV
  double shunt_q = 0.0;          // MVar per kV^2, multiplies v_i
  double utility_weight = 0.0;
};

/// Line `node` connects ancestor(node) to node.
struct LineParams {
  int node = 0;
  double r_ohm = 0.0;
  double x_ohm = 0.0;
  double l_max_ka2 = 0.0;
};

struct Bases {
  double v0_kv = 7.2;
  double s_base_mva = 1.0;
  double epsilon = 0.05;
};

/// Per-unit node data used by every solver. `utility_weight` is scaled so
/// that the per-unit objective equals the physical objective / s_base.
struct NodeData {
  double p_load = 0.0;
  double q_load = 0.0;
  double qc_slope = 0.0;  // q_c = qc_slope * p_c
  double pc_min = 0.0;
  double pc_max = 0.0;
  double s_w = 0.0;
  double q_s = 0.0;
  double utility_weight = 0.0;
};

struct LineData {
  double r = 0.0;
  double x = 0.0;
  double l_max = 0.0;
};

/// Immutable radial feeder rooted at node 0. Node ids are 0..N.
class Network {
 public:
  static Network build(std::vector<NodeParams> nodes,
                       std::vector<LineParams> lines, Bases bases);

  std::size_t node_count() const { return params_.size(); }
  std::size_t line_count() const { return params_.size() - 1; }

  const Bases& bases() const { return bases_; }
  const PerUnitBase& per_unit() const { return pu_; }
  double v0() const { return 1.0; }  // substation voltage^2 in pu
  double epsilon() const { return bases_.epsilon; }
  double v_min() const { return (1.0 - bases_.epsilon) * (1.0 - bases_.epsilon); }
  double v_max() const { return (1.0 + bases_.epsilon) * (1.0 + bases_.epsilon); }

  bool contains(int id) const {
    return id >= 0 && static_cast<std::size_t>(id) < params_.size();
  }
  /// -1 for the root.
  int ancestor(int id) const { return ancestor_[checked(id)]; }
  std::span<const int> children(int id) const;
  int depth(int id) const { return depth_[checked(id)]; }
  bool is_leaf(int id) const { return children(id).empty(); }

  const NodeParams& node_params(int id) const { return params_[checked(id)]; }
  const LineParams& line_params(int id) const;
  const NodeData& node(int id) const { return node_[checked(id)]; }
  const LineData& line(int id) const;

  /// Nodes on the path from the root down to `id`, root first.
  std::vector<int> path_to_root(int id, bool include_root = true) const;
  std::vector<int> leaves() const;
  /// Breadth-first order, root first; reversing it gives a leaves-up sweep.
  std::span<const int> topological_order() const { return order_; }

 private:
  std::size_t checked(int id) const;

  Bases bases_;
  PerUnitBase pu_;
  std::vector<NodeParams> params_;
  std::vector<LineParams> line_params_;  // indexed by node, [0] unused
  std::vector<NodeData> node_;
  std::vector<LineData> line_;
  std::vector<int> ancestor_;
  std::vector<int> depth_;
  std::vector<int> child_offsets_;
  std::vector<int> child_ids_;
  std::vector<int> order_;
};

}  // namespace dsopf::network

#endif  // DSOPF_NETWORK_HPP

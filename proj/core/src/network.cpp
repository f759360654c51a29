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

#include "dsopf/network.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "dsopf/error.hpp"

namespace dsopf::network {
namespace {

[[noreturn]] void bad(const std::string& field, int node, const std::string& why) {
  throw Error(ErrorCode::kBadParameter,
              "node " + std::to_string(node) + " field '" + field + "': " + why);
}

void validate_node(const NodeParams& n) {
  if (!(n.power_factor > 0.0 && n.power_factor <= 1.0))
    bad("pf", n.id, "power factor must lie in (0, 1]");
  if (!(n.pc_min_mw >= 0.0)) bad("pc_min_mw", n.id, "must be >= 0");
  if (!(n.pc_max_mw >= n.pc_min_mw)) bad("pc_max_mw", n.id, "must be >= pc_min_mw");
  if (!(n.pv_capacity_mva >= 0.0)) bad("s_w_mva", n.id, "must be >= 0");
  if (!(n.utility_weight >= 0.0)) bad("k_u", n.id, "must be >= 0");
  if (!std::isfinite(n.p_load_mw)) bad("p_l_mw", n.id, "not finite");
  if (!std::isfinite(n.q_load_mvar)) bad("q_l_mvar", n.id, "not finite");
  if (!std::isfinite(n.shunt_q)) bad("q_s", n.id, "not finite");
  if (n.id == 0) {
    if (n.p_load_mw != 0.0 || n.q_load_mvar != 0.0) bad("p_l_mw", 0, "substation carries no load");
    if (n.pc_max_mw != 0.0) bad("pc_max_mw", 0, "substation has no elastic load");
    if (n.pv_capacity_mva != 0.0) bad("s_w_mva", 0, "substation has no PV");
  }
}

void validate_line(const LineParams& l) {
  if (!(l.r_ohm >= 0.0)) bad("r_ohm", l.node, "must be >= 0");
  if (!(l.x_ohm >= 0.0)) bad("x_ohm", l.node, "must be >= 0");
  if (l.r_ohm == 0.0 && l.x_ohm == 0.0) bad("r_ohm", l.node, "r and x both zero");
  if (!(l.l_max_ka2 > 0.0)) bad("l_max_ka2", l.node, "must be > 0");
}

}  // namespace

Network Network::build(std::vector<NodeParams> nodes, std::vector<LineParams> lines,
                       Bases bases) {
  if (!(bases.v0_kv > 0.0)) bad("v0_kv", 0, "must be > 0");
  if (!(bases.s_base_mva > 0.0)) bad("s_base_mva", 0, "must be > 0");
  if (!(bases.epsilon > 0.0 && bases.epsilon < 1.0)) bad("epsilon", 0, "must lie in (0, 1)");
  if (nodes.size() < 2) bad("nodes", 0, "need the substation and at least one user");

  const std::size_t n = nodes.size();
  Network net;
  net.bases_ = bases;
  net.pu_ = PerUnitBase{bases.s_base_mva, bases.v0_kv};
  net.params_.resize(n);
  std::vector<bool> seen(n, false);
  for (auto& node : nodes) {
    if (node.id < 0 || static_cast<std::size_t>(node.id) >= n)
      bad("id", node.id, "node ids must be 0..N");
    if (seen[node.id]) bad("id", node.id, "duplicate node id");
    seen[node.id] = true;
    net.params_[node.id] = node;
  }

  net.ancestor_.assign(n, -1);
  for (const auto& node : net.params_) {
    if (node.id == 0) {
      if (node.ancestor) bad("ancestor", 0, "the root has no ancestor");
      continue;
    }
    if (!node.ancestor)
      throw Error(ErrorCode::kDisconnectedNode,
                  "node " + std::to_string(node.id) + " has no ancestor");
    const int a = *node.ancestor;
    if (a < 0 || static_cast<std::size_t>(a) >= n)
      throw Error(ErrorCode::kDisconnectedNode,
                  "node " + std::to_string(node.id) + " hangs off unknown node " +
                      std::to_string(a));
    if (a == node.id)
      throw Error(ErrorCode::kCycleDetected, "node " + std::to_string(a) + " is its own ancestor");
    net.ancestor_[node.id] = a;
  }
  for (const auto& node : net.params_) validate_node(node);

  net.line_params_.assign(n, LineParams{});
  std::vector<bool> has_line(n, false);
  for (const auto& line : lines) {
    if (line.node <= 0 || static_cast<std::size_t>(line.node) >= n)
      bad("node", line.node, "line must end at a non-root node");
    if (has_line[line.node]) bad("lines", line.node, "duplicate line");
    has_line[line.node] = true;
    validate_line(line);
    net.line_params_[line.node] = line;
  }
  for (std::size_t i = 1; i < n; ++i)
    if (!has_line[i])
      throw Error(ErrorCode::kMissingLine, "node " + std::to_string(i) + " has no line");

  // Every ancestor chain must reach the root in fewer than n steps.
  for (std::size_t i = 1; i < n; ++i) {
    int cur = static_cast<int>(i);
    std::size_t steps = 0;
    while (cur != 0) {
      cur = net.ancestor_[cur];
      if (++steps > n)
        throw Error(ErrorCode::kCycleDetected,
                    "ancestor chain of node " + std::to_string(i) + " never reaches the root");
    }
  }

  std::vector<int> counts(n, 0);
  for (std::size_t i = 1; i < n; ++i) ++counts[net.ancestor_[i]];
  net.child_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) net.child_offsets_[i + 1] = net.child_offsets_[i] + counts[i];
  net.child_ids_.assign(n - 1, 0);
  std::vector<int> fill(net.child_offsets_.begin(), net.child_offsets_.end() - 1);
  for (std::size_t i = 1; i < n; ++i) net.child_ids_[fill[net.ancestor_[i]]++] = static_cast<int>(i);

  net.depth_.assign(n, 0);
  net.order_.clear();
  net.order_.reserve(n);
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    net.order_.push_back(cur);
    for (int c : net.children(cur)) {
      net.depth_[c] = net.depth_[cur] + 1;
      queue.push_back(c);
    }
  }
  if (net.order_.size() != n)
    throw Error(ErrorCode::kDisconnectedNode, "tree does not span all nodes");

  const PerUnitBase& pu = net.pu_;
  net.node_.resize(n);
  net.line_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = net.params_[i];
    NodeData d;
    d.p_load = pu.power_to_pu(p.p_load_mw);
    d.q_load = pu.power_to_pu(p.q_load_mvar);
    d.qc_slope = std::sqrt(1.0 / (p.power_factor * p.power_factor) - 1.0);
    d.pc_min = pu.power_to_pu(p.pc_min_mw);
    d.pc_max = pu.power_to_pu(p.pc_max_mw);
    d.s_w = pu.power_to_pu(p.pv_capacity_mva);
    d.q_s = pu.shunt_to_pu(p.shunt_q);
    d.utility_weight = p.utility_weight * bases.s_base_mva;
    net.node_[i] = d;
    if (i > 0) {
      const auto& l = net.line_params_[i];
      net.line_[i] = LineData{pu.impedance_to_pu(l.r_ohm), pu.impedance_to_pu(l.x_ohm),
                              pu.current_sq_to_pu(l.l_max_ka2)};
    }
  }
  return net;
}

std::size_t Network::checked(int id) const {
  if (!contains(id)) throw Error(ErrorCode::kUnknownNode, "node " + std::to_string(id));
  return static_cast<std::size_t>(id);
}

std::span<const int> Network::children(int id) const {
  const std::size_t i = checked(id);
  return std::span<const int>(child_ids_).subspan(
      child_offsets_[i], child_offsets_[i + 1] - child_offsets_[i]);
}

const LineParams& Network::line_params(int id) const {
  const std::size_t i = checked(id);
  if (i == 0) throw Error(ErrorCode::kUnknownNode, "the root has no line");
  return line_params_[i];
}

const LineData& Network::line(int id) const {
  const std::size_t i = checked(id);
  if (i == 0) throw Error(ErrorCode::kUnknownNode, "the root has no line");
  return line_[i];
}

std::vector<int> Network::path_to_root(int id, bool include_root) const {
  checked(id);
  std::vector<int> path;
  path.reserve(depth_[id] + 1);
  for (int cur = id; cur != -1; cur = ancestor_[cur]) {
    if (cur == 0 && !include_root) break;
    path.push_back(cur);
  }
  return {path.rbegin(), path.rend()};
}

std::vector<int> Network::leaves() const {
  std::vector<int> out;
  for (std::size_t i = 1; i < node_count(); ++i)
    if (child_offsets_[i + 1] == child_offsets_[i]) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace dsopf::network

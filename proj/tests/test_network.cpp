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


#include <gtest/gtest.h>

#include <functional>

#include "dsopf/error.hpp"
#include "dsopf/feeder.hpp"
#include "dsopf/network.hpp"
#include "oracles/path.hpp"
#include "support.hpp"

namespace dsopf {
namespace {

using network::LineParams;
using network::Network;
using network::NodeParams;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

std::vector<NodeParams> three_nodes() {
  return {{0, std::nullopt, 0, 0, 1, 0, 0, 0, 0, 0},
          {1, 0, 0.1, 0.03, 0.95, 0, 0.05, 0.1, 0, 1},
          {2, 1, 0.1, 0.03, 0.95, 0, 0.05, 0.1, 0, 1}};
}

TEST(Network, ThreeNodeChain) {
  const auto net = Network::build(three_nodes(), {{1, 0.1, 0.1, 0.5}, {2, 0.1, 0.1, 0.5}}, {});
  ASSERT_EQ(net.node_count(), 3u);
  ASSERT_EQ(net.children(0).size(), 1u);
  EXPECT_EQ(net.children(0)[0], 1);
  EXPECT_EQ(net.children(1)[0], 2);
  EXPECT_TRUE(net.children(2).empty());
  EXPECT_EQ(net.ancestor(0), -1);
  EXPECT_EQ(net.depth(2), 2);
  EXPECT_TRUE(net.is_leaf(2));
}

TEST(Network, DuplicateLineRejected) {
  const auto c = code_of([] {
    Network::build(three_nodes(), {{1, 0.1, 0.1, 0.5}, {2, 0.1, 0.1, 0.5}, {2, 0.2, 0.1, 0.5}},
                   {});
  });
  EXPECT_TRUE(c == ErrorCode::kBadParameter || c == ErrorCode::kMissingLine);
}

TEST(Network, MissingLineRejected) {
  EXPECT_EQ(code_of([] { Network::build(three_nodes(), {{1, 0.1, 0.1, 0.5}}, {}); }),
            ErrorCode::kMissingLine);
}

TEST(Network, CycleRejected) {
  auto nodes = three_nodes();
  nodes[1].ancestor = 2;
  nodes[2].ancestor = 1;
  EXPECT_EQ(code_of([&] {
              Network::build(nodes, {{1, 0.1, 0.1, 0.5}, {2, 0.1, 0.1, 0.5}}, {});
            }),
            ErrorCode::kCycleDetected);
}

TEST(Network, DanglingAncestorRejected) {
  auto nodes = three_nodes();
  nodes[2].ancestor = 7;
  EXPECT_EQ(code_of([&] {
              Network::build(nodes, {{1, 0.1, 0.1, 0.5}, {2, 0.1, 0.1, 0.5}}, {});
            }),
            ErrorCode::kDisconnectedNode);
}

TEST(Network, BadParametersNamed) {
  auto nodes = three_nodes();
  nodes[2].power_factor = 1.2;
  try {
    Network::build(nodes, {{1, 0.1, 0.1, 0.5}, {2, 0.1, 0.1, 0.5}}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadParameter);
    EXPECT_NE(std::string(e.what()).find("node 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("pf"), std::string::npos);
  }
  EXPECT_EQ(code_of([] {
              Network::build(three_nodes(), {{1, 0.0, 0.0, 0.5}, {2, 0.1, 0.1, 0.5}}, {});
            }),
            ErrorCode::kBadParameter);
  auto root_load = three_nodes();
  root_load[0].p_load_mw = 0.1;
  EXPECT_EQ(code_of([&] {
              Network::build(root_load, {{1, 0.1, 0.1, 0.5}, {2, 0.1, 0.1, 0.5}}, {});
            }),
            ErrorCode::kBadParameter);
}

TEST(Network, DayTypeFeederShape) {
  const auto net = network::make_feeder(network::day_type_feeder());
  EXPECT_EQ(net.node_count(), 51u);
  EXPECT_EQ(net.children(20).size(), 3u);  // trunk continues plus two laterals
  EXPECT_EQ(net.depth(30), 30);
  EXPECT_EQ(net.depth(40), 30);
  EXPECT_EQ(net.depth(50), 30);
  EXPECT_EQ(net.leaves().size(), 3u);
  const auto& l = net.line_params(7);
  EXPECT_NEAR(l.r_ohm, 0.33 * 0.2, 1e-15);
  EXPECT_NEAR(l.x_ohm, 0.38 * 0.2, 1e-15);
}

TEST(Network, PathToRoot) {
  const auto net = network::make_feeder(network::day_type_feeder());
  std::vector<int> expected;
  for (int i = 0; i <= 20; ++i) expected.push_back(i);
  for (int i = 31; i <= 35; ++i) expected.push_back(i);
  EXPECT_EQ(net.path_to_root(35), expected);
  EXPECT_EQ(net.path_to_root(35, false),
            std::vector<int>(expected.begin() + 1, expected.end()));
  EXPECT_EQ(net.path_to_root(0), std::vector<int>{0});
  EXPECT_EQ(testing::tree(2).path_to_root(2), (std::vector<int>{0, 1, 2}));
}

TEST(Network, PathMatchesBfsOracle) {
  const auto net = network::make_feeder(network::local_control_feeder());
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 1; i < net.node_count(); ++i)
    edges.emplace_back(net.ancestor(static_cast<int>(i)), static_cast<int>(i));
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    const int id = static_cast<int>(i);
    const auto path = net.path_to_root(id);
    EXPECT_EQ(path, oracle::bfs_path(edges, static_cast<int>(net.node_count()), id));
    EXPECT_EQ(path.front(), 0);
    EXPECT_LE(path.size(), net.node_count());
  }
}

TEST(Network, UnknownNode) {
  const auto net = testing::tree(2);
  EXPECT_EQ(code_of([&] { net.path_to_root(5); }), ErrorCode::kUnknownNode);
}

TEST(Network, ChildCountsSumToLines) {
  const auto net = network::make_feeder(network::local_control_feeder());
  std::size_t total = 0;
  for (std::size_t i = 0; i < net.node_count(); ++i)
    total += net.children(static_cast<int>(i)).size();
  EXPECT_EQ(total, net.line_count());
}

TEST(Network, PerUnitRoundTrip) {
  const auto net = network::make_feeder(network::day_type_feeder());
  const auto& pu = net.per_unit();
  for (double q : {1e-3, 0.37, 12.5, 7.2 * 7.2}) {
    EXPECT_NEAR(pu.power_from_pu(pu.power_to_pu(q)), q, 1e-12 * q);
    EXPECT_NEAR(pu.impedance_from_pu(pu.impedance_to_pu(q)), q, 1e-12 * q);
    EXPECT_NEAR(pu.voltage_sq_from_pu(pu.voltage_sq_to_pu(q)), q, 1e-12 * q);
    EXPECT_NEAR(pu.current_sq_from_pu(pu.current_sq_to_pu(q)), q, 1e-12 * q);
    EXPECT_NEAR(pu.shunt_from_pu(pu.shunt_to_pu(q)), q, 1e-12 * q);
  }
  EXPECT_NEAR(pu.impedance_base(), 51.84, 1e-12);
  EXPECT_NEAR(net.line(1).r, 0.066 / 51.84, 1e-15);
  EXPECT_DOUBLE_EQ(net.v0(), 1.0);
  EXPECT_NEAR(net.v_min(), 0.95 * 0.95, 1e-15);
}

}  // namespace
}  // namespace dsopf

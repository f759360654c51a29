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

#ifndef DSOPF_EXACTNESS_HPP
#define DSOPF_EXACTNESS_HPP

#include <span>
#include <string>
#include <vector>

#include "dsopf/network.hpp"
#include "dsopf/program.hpp"

namespace dsopf::exactness {

/// Loss-free flow approximation, per-unit, indexed by node. P[0] and Q[0]
/// are the totals drawn at the substation and v[0] = v0.
struct LinDistFlowSolution {
  std::vector<double> P, Q, v;
};

/// All maps per-unit and indexed by node. Shunts enter as the fixed
/// injection q_s * v0.
LinDistFlowSolution lindistflow(const network::Network& net, std::span<const double> pc,
                                std::span<const double> qw, std::span<const double> w);

/// A window whose product failed (or came closest to failing).
struct Window {
  std::vector<int> path;  // root excluded: d_1 .. d_t
  int t = 0;
  int s = 0;
  double value = 0.0;  // smaller component of the product
};

struct ExactnessVerdict {
  std::vector<bool> scenario_pass;
  bool all_scenarios_pass = true;
  bool m_independent_pass = true;
  /// Smallest checked component over all scenarios / for the max-injection case.
  double min_component = 0.0;
  double m_independent_min_component = 0.0;
  /// Worst window over every check; meaningful when some window exists.
  Window worst;
  bool has_windows = false;
  double tolerance = 1e-12;
  std::vector<std::string> notes;
};

/// Evaluates the sufficient condition on every root path window for each
/// scenario and for the max-over-scenarios injection.
ExactnessVerdict check_exactness(const program::StochasticProgram& program,
                                 double tolerance = 1e-12);

}  // namespace dsopf::exactness

#endif  // DSOPF_EXACTNESS_HPP

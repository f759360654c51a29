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

#include "dsopf/exactness.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>

#include "dsopf/error.hpp"

namespace dsopf::exactness {

LinDistFlowSolution lindistflow(const network::Network& net, std::span<const double> pc,
                                std::span<const double> qw, std::span<const double> w) {
  const std::size_t n = net.node_count();
  if (pc.size() != n || qw.size() != n || w.size() != n)
    throw Error(ErrorCode::kBadParameter, "lindistflow maps must cover every node");
  LinDistFlowSolution out;
  out.P.assign(n, 0.0);
  out.Q.assign(n, 0.0);
  out.v.assign(n, net.v0());
  const auto order = net.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int i = *it;
    const auto& nd = net.node(i);
    out.P[i] += nd.p_load + pc[i] - w[i];
    out.Q[i] += nd.q_load + nd.qc_slope * pc[i] - qw[i] - nd.q_s * net.v0();
    if (i != 0) {
      const int a = net.ancestor(i);
      out.P[a] += out.P[i];
      out.Q[a] += out.Q[i];
    }
  }
  for (int i : order) {
    if (i == 0) continue;
    const auto& ln = net.line(i);
    out.v[i] = out.v[net.ancestor(i)] - 2.0 * (ln.r * out.P[i] + ln.x * out.Q[i]);
  }
  return out;
}

namespace {

using Mat2 = std::array<double, 4>;  // row-major

struct Check {
  bool pass = true;
  double min_component = std::numeric_limits<double>::infinity();
  Window worst;
  bool has_windows = false;
};

Check check_injection(const network::Network& net, std::span<const double> w, double tol) {
  const std::size_t n = net.node_count();
  std::vector<double> pc(n), qw(n);
  for (std::size_t u = 0; u < n; ++u) {
    pc[u] = net.node(static_cast<int>(u)).pc_min;
    qw[u] = net.node(static_cast<int>(u)).s_w;
  }
  const LinDistFlowSolution ldf = lindistflow(net, pc, qw, w);
  const double scale = 2.0 / ((1.0 - net.epsilon()) * (1.0 - net.epsilon()) * net.v0());
  std::vector<Mat2> a(n, Mat2{1.0, 0.0, 0.0, 1.0});
  for (std::size_t u = 1; u < n; ++u) {
    const auto& ln = net.line(static_cast<int>(u));
    const double pm = std::min(ldf.P[u], 0.0);
    const double qm = std::min(ldf.Q[u], 0.0);
    a[u] = {1.0 + scale * ln.r * pm, scale * ln.r * qm, scale * ln.x * pm,
            1.0 + scale * ln.x * qm};
  }

  Check out;
  for (std::size_t u = 1; u < n; ++u) {
    const int node = static_cast<int>(u);
    const std::vector<int> path = net.path_to_root(node, false);  // d_1 .. d_t
    const int t = static_cast<int>(path.size());
    if (t < 2) continue;
    const auto& ln = net.line(node);
    double v0 = ln.r, v1 = ln.x;
    for (int j = t - 1; j >= 1; --j) {
      const Mat2& m = a[static_cast<std::size_t>(path[static_cast<std::size_t>(j - 1)])];
      const double n0 = m[0] * v0 + m[1] * v1;
      const double n1 = m[2] * v0 + m[3] * v1;
      v0 = n0;
      v1 = n1;
      const double c = std::min(v0, v1);
      out.has_windows = true;
      if (c < out.min_component) {
        out.min_component = c;
        out.worst = Window{path, t, j - 1, c};
      }
      if (!(c > tol)) out.pass = false;
    }
  }
  if (!out.has_windows) out.min_component = std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace

ExactnessVerdict check_exactness(const program::StochasticProgram& program, double tolerance) {
  const auto& net = program.network();
  const std::size_t n = net.node_count();
  const std::size_t M = program.scenario_count();
  ExactnessVerdict v;
  v.tolerance = tolerance;
  v.min_component = std::numeric_limits<double>::infinity();
  std::vector<double> w(n), w_max(n, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t u = 0; u < n; ++u) {
      w[u] = program.injection(m, static_cast<int>(u));
      w_max[u] = std::max(w_max[u], w[u]);
    }
    const Check c = check_injection(net, w, tolerance);
    v.scenario_pass.push_back(c.pass);
    v.all_scenarios_pass = v.all_scenarios_pass && c.pass;
    if (c.has_windows && c.min_component < v.min_component) {
      v.min_component = c.min_component;
      v.worst = c.worst;
      v.has_windows = true;
    }
  }
  const Check c = check_injection(net, w_max, tolerance);
  v.m_independent_pass = c.pass;
  v.m_independent_min_component = c.min_component;
  if (c.has_windows && (!v.has_windows || c.min_component < v.min_component)) {
    v.worst = c.worst;
    v.has_windows = true;
  }
  v.notes = {
      "The condition certifies exactness of a modified problem, not of the problem as solved:",
      "1. the substation cost C(P0) is assumed strictly increasing;",
      "2. the upper bounds on line currents are removed;",
      "3. shunt capacitors are fixed reactive injections independent of voltage "
      "(evaluated here as q_s * v0);",
      "4. K_loss is set to 0;",
      "5. the upper voltage limit is enforced on the loss-free voltage estimate instead "
      "of on v.",
  };
  return v;
}

}  // namespace dsopf::exactness

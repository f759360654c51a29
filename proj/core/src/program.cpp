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

#include "dsopf/program.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsopf/error.hpp"

namespace dsopf::program {

void validate(const ObjectiveConfig& cfg) {
  if (!(cfg.export_price >= 0.0))
    throw Error(ErrorCode::kBadParameter, "export price b must be >= 0");
  if (!(cfg.import_price >= cfg.export_price))
    throw Error(ErrorCode::kBadParameter, "import price a must be >= export price b");
  if (!(cfg.loss_weight >= 0.0)) throw Error(ErrorCode::kBadParameter, "K_loss must be >= 0");
  if (cfg.general_cost && (!cfg.general_cost->value || !cfg.general_cost->derivative))
    throw Error(ErrorCode::kBadParameter, "general cost needs value and derivative");
}

Solution make_empty_solution(std::size_t nodes, std::size_t scenarios) {
  Solution s;
  s.pc.assign(nodes, 0.0);
  s.scenarios.resize(scenarios);
  for (auto& f : s.scenarios) {
    f.P.assign(nodes, 0.0);
    f.Q.assign(nodes, 0.0);
    f.v.assign(nodes, 1.0);
    f.l.assign(nodes, 0.0);
    f.qw.assign(nodes, 0.0);
  }
  return s;
}

StochasticProgram StochasticProgram::assemble(network::Network net,
                                              scenario::ScenarioSet scenarios,
                                              ObjectiveConfig objective) {
  validate(objective);
  if (scenarios.size() == 0)
    throw Error(ErrorCode::kScenarioNetworkMismatch, "no scenarios");
  for (std::size_t m = 0; m < scenarios.size(); ++m)
    if (scenarios.scenarios[m].w_mw.size() != net.node_count())
      throw Error(ErrorCode::kScenarioNetworkMismatch,
                  "scenario " + std::to_string(m) + " covers " +
                      std::to_string(scenarios.scenarios[m].w_mw.size()) + " nodes, network has " +
                      std::to_string(net.node_count()));
  scenario::validate(scenarios);

  StochasticProgram p;
  const std::size_t n = net.node_count();
  const std::size_t M = scenarios.size();
  p.w_.assign(n * M, 0.0);
  p.qw_max_.assign(n * M, 0.0);
  const PerUnitBase& pu = net.per_unit();
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double w_mw = scenarios.scenarios[m].w_mw[i];
      const double s_mva = net.node_params(static_cast<int>(i)).pv_capacity_mva;
      if (w_mw > s_mva)
        throw Error(ErrorCode::kInjectionExceedsNameplate,
                    "node " + std::to_string(i) + " scenario " + std::to_string(m) + ": w = " +
                        std::to_string(w_mw) + " MW exceeds s_w = " + std::to_string(s_mva));
      const double w = pu.power_to_pu(w_mw);
      const double s = net.node(static_cast<int>(i)).s_w;
      p.w_[m * n + i] = w;
      p.qw_max_[m * n + i] = std::sqrt(std::max(0.0, s * s - w * w));
    }
  }
  p.net_ = std::move(net);
  p.scenarios_ = std::move(scenarios);
  p.objective_ = std::move(objective);
  return p;
}

StochasticProgram StochasticProgram::with_scenarios(scenario::ScenarioSet scenarios) const {
  return assemble(net_, std::move(scenarios), objective_);
}

ObjectiveBreakdown objective_breakdown(const StochasticProgram& program, const Solution& sol) {
  const auto& net = program.network();
  const double sb = net.per_unit().s_base_mva;
  const auto& cfg = program.objective();
  ObjectiveBreakdown out;
  for (std::size_t i = 1; i < net.node_count(); ++i) {
    const auto& nd = net.node(static_cast<int>(i));
    const double d = sol.pc[i] - nd.pc_max;
    out.negative_utility += nd.utility_weight * d * d * sb;
  }
  for (std::size_t m = 0; m < program.scenario_count(); ++m) {
    const auto& f = sol.scenarios[m];
    const double pi = program.probability(m);
    if (cfg.general_cost) {
      out.expected_cost += pi * cfg.general_cost->value(f.P[0] * sb);
    } else {
      out.expected_cost +=
          pi * (cfg.import_price * f.p0_plus - cfg.export_price * f.p0_minus) * sb;
    }
    double losses = 0.0;
    for (std::size_t i = 1; i < net.node_count(); ++i)
      losses += net.line(static_cast<int>(i)).r * f.l[i];
    out.expected_losses_mw += pi * losses * sb;
  }
  out.loss_term = cfg.loss_weight * out.expected_losses_mw;
  out.total = out.negative_utility + out.expected_cost + out.loss_term;
  return out;
}

double objective_value(const StochasticProgram& program, const Solution& sol) {
  return objective_breakdown(program, sol).total;
}

const FamilyViolation& AuditReport::family(const std::string& name) const {
  for (const auto& f : families)
    if (f.name == name) return f;
  throw Error(ErrorCode::kBadParameter, "no constraint family '" + name + "'");
}

namespace {

struct Tracker {
  FamilyViolation v;
  explicit Tracker(std::string name) { v.name = std::move(name); }
  void see(double violation, int node, int scenario) {
    if (violation > v.worst) {
      v.worst = violation;
      v.node = node;
      v.scenario = scenario;
    }
  }
};

}  // namespace

AuditReport feasibility_audit(const StochasticProgram& program, const Solution& sol,
                              double tol) {
  const auto& net = program.network();
  const std::size_t n = net.node_count();
  Tracker real("real_balance"), reactive("reactive_balance"), drop("voltage_drop"),
      cone("cone"), band("voltage_band"), cap("current_cap"), pc_box("pc_box"),
      qw_box("qw_box"), split("p0_split"), sign("p0_sign");
  AuditReport report;
  report.tolerance = tol;
  report.socp_gap = -std::numeric_limits<double>::infinity();

  for (std::size_t i = 1; i < n; ++i) {
    const auto& nd = net.node(static_cast<int>(i));
    pc_box.see(std::max(nd.pc_min - sol.pc[i], sol.pc[i] - nd.pc_max), static_cast<int>(i), -1);
  }

  for (std::size_t m = 0; m < program.scenario_count(); ++m) {
    const auto& f = sol.scenarios[m];
    const int sm = static_cast<int>(m);
    for (std::size_t ii = 0; ii < n; ++ii) {
      const int i = static_cast<int>(ii);
      const auto& nd = net.node(i);
      double p_sum = 0.0, q_sum = 0.0;
      for (int j : net.children(i)) {
        const auto& lj = net.line(j);
        p_sum += f.P[j] + lj.r * f.l[j];
        q_sum += f.Q[j] + lj.x * f.l[j];
      }
      const double pc = i == 0 ? 0.0 : sol.pc[i];
      const double qw = i == 0 ? 0.0 : f.qw[i];
      const double v = i == 0 ? net.v0() : f.v[i];
      real.see(std::abs(f.P[i] - (p_sum + nd.p_load + pc - program.injection(m, i))), i, sm);
      reactive.see(
          std::abs(f.Q[i] - (q_sum + nd.q_load + nd.qc_slope * pc - qw - nd.q_s * v)), i, sm);
      if (i == 0) continue;

      const auto& ln = net.line(i);
      const int a = net.ancestor(i);
      const double va = a == 0 ? net.v0() : f.v[a];
      drop.see(std::abs(va - (f.v[i] + 2.0 * (ln.r * f.P[i] + ln.x * f.Q[i]) +
                              (ln.r * ln.r + ln.x * ln.x) * f.l[i])),
               i, sm);
      const double slack = f.v[i] * f.l[i] - f.P[i] * f.P[i] - f.Q[i] * f.Q[i];
      cone.see(-slack, i, sm);
      report.socp_gap = std::max(report.socp_gap, slack);
      band.see(std::max(net.v_min() * net.v0() - f.v[i], f.v[i] - net.v_max() * net.v0()), i,
               sm);
      cap.see(std::max(f.l[i] - ln.l_max, -f.l[i]), i, sm);
      qw_box.see(std::abs(f.qw[i]) - program.qw_max(m, i), i, sm);
    }
    if (!program.objective().general_cost) {
      split.see(std::abs(f.P[0] - (f.p0_plus - f.p0_minus)), 0, sm);
      sign.see(std::max(-f.p0_plus, -f.p0_minus), 0, sm);
    }
  }
  if (n < 2 || program.scenario_count() == 0) report.socp_gap = 0.0;

  for (Tracker* t : {&real, &reactive, &drop, &cone, &band, &cap, &pc_box, &qw_box, &split, &sign})
    report.families.push_back(t->v);
  report.pass = std::all_of(report.families.begin(), report.families.end(),
                            [tol](const FamilyViolation& f) { return f.worst <= tol; });
  return report;
}

double complementarity_check(const Solution& sol) {
  double worst = 0.0;
  for (const auto& f : sol.scenarios) worst = std::max(worst, std::min(f.p0_plus, f.p0_minus));
  return worst;
}

}  // namespace dsopf::program

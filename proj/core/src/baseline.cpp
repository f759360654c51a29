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

#include "dsopf/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dsopf/error.hpp"
#include "dsopf/random.hpp"

namespace dsopf::baseline {

double local_policy_qw(double w, double p_c, double q_c, double K, double qw_max, double r,
                       double x) {
  if (!(qw_max >= 0.0)) throw Error(ErrorCode::kBadParameter, "q_w_max must be >= 0");
  if (r == 0.0) throw Error(ErrorCode::kZeroResistance, "voltage term needs r > 0");
  auto clip = [&](double t) { return std::clamp(t, -qw_max, qw_max); };
  const double f_l = clip(q_c);
  const double f_v = clip(q_c + x * (p_c - w) / r);
  return clip(K * f_l + (1.0 - K) * f_v);
}

double local_policy_qw(const network::Network& net, int node, double w, double p_c,
                       double q_c, double K, double qw_max) {
  const auto& ln = net.line(node);
  return local_policy_qw(w, p_c, q_c, K, qw_max, ln.r, ln.x);
}

PowerFlowResult radial_powerflow(const network::Network& net, std::span<const double> pc,
                                 std::span<const double> qw, std::span<const double> w,
                                 double tol, int max_iters) {
  const std::size_t n = net.node_count();
  if (pc.size() != n || qw.size() != n || w.size() != n)
    throw Error(ErrorCode::kBadParameter, "power flow inputs must cover every node");
  PowerFlowResult res;
  res.P.assign(n, 0.0);
  res.Q.assign(n, 0.0);
  res.l.assign(n, 0.0);
  res.v.assign(n, net.v0());
  const auto order = net.topological_order();

  auto backward = [&] {
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int i = *it;
      const auto& nd = net.node(i);
      double p = nd.p_load + pc[i] - w[i];
      double q = nd.q_load + nd.qc_slope * pc[i] - qw[i] - nd.q_s * res.v[i];
      for (int j : net.children(i)) {
        p += res.P[j] + net.line(j).r * res.l[j];
        q += res.Q[j] + net.line(j).x * res.l[j];
      }
      res.P[i] = p;
      res.Q[i] = q;
      res.l[i] = i == 0 ? 0.0 : (p * p + q * q) / res.v[i];
    }
  };

  for (int k = 1; k <= max_iters; ++k) {
    backward();
    double change = 0.0;
    bool collapsed = false;
    for (int i : order) {
      if (i == 0) continue;
      const auto& ln = net.line(i);
      const double v = res.v[net.ancestor(i)] - 2.0 * (ln.r * res.P[i] + ln.x * res.Q[i]) -
                       (ln.r * ln.r + ln.x * ln.x) * res.l[i];
      change = std::max(change, std::abs(v - res.v[i]));
      res.v[i] = v;
      if (!(v > 0.0)) collapsed = true;
    }
    res.iterations = k;
    if (collapsed) break;
    if (change < tol) {
      res.converged = true;
      break;
    }
  }
  if (res.converged) backward();

  // Balance residual of the returned iterate, voltage-drop rows.
  double worst = 0.0;
  for (std::size_t u = 1; u < n; ++u) {
    const int i = static_cast<int>(u);
    const auto& ln = net.line(i);
    const double drop = res.v[net.ancestor(i)] - res.v[u] -
                        2.0 * (ln.r * res.P[u] + ln.x * res.Q[u]) -
                        (ln.r * ln.r + ln.x * ln.x) * res.l[u];
    worst = std::max(worst, std::abs(drop));
  }
  res.max_balance_residual = worst;
  return res;
}

std::vector<CdfPoint> empirical_cdf(std::span<const double> samples) {
  std::vector<double> xs;
  for (double d : samples)
    if (!std::isnan(d)) xs.push_back(d);
  std::sort(xs.begin(), xs.end());
  std::vector<CdfPoint> cdf;
  const double n = static_cast<double>(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k + 1 < xs.size() && xs[k + 1] == xs[k]) continue;
    cdf.push_back({xs[k], static_cast<double>(k + 1) / n});
  }
  return cdf;
}

namespace {

double max_deviation(const std::vector<double>& v) {
  double worst = 0.0;
  for (std::size_t u = 1; u < v.size(); ++u)
    worst = std::max(worst, std::abs(std::sqrt(std::max(v[u], 0.0)) - 1.0));
  return worst;
}

double line_losses(const network::Network& net, const std::vector<double>& l) {
  double s = 0.0;
  for (std::size_t u = 1; u < l.size(); ++u) s += net.line(static_cast<int>(u)).r * l[u];
  return s;
}

template <typename QwFor>
PolicyMetrics run_power_flows(const program::StochasticProgram& program,
                              std::span<const double> pc, QwFor&& qw_for) {
  const auto& net = program.network();
  const std::size_t n = net.node_count();
  const double sb = net.per_unit().s_base_mva;
  PolicyMetrics out;
  std::vector<double> w(n), qw(n);
  double losses = 0.0, mass = 0.0;
  for (std::size_t m = 0; m < program.scenario_count(); ++m) {
    for (std::size_t u = 0; u < n; ++u) w[u] = program.injection(m, static_cast<int>(u));
    qw_for(m, w, qw);
    const PowerFlowResult pf = radial_powerflow(net, pc, qw, w);
    if (!pf.converged) {
      ++out.failed;
      out.scenario_max_deviation.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    ++out.evaluated;
    const double dev = max_deviation(pf.v);
    out.scenario_max_deviation.push_back(dev);
    out.max_deviation = std::max(out.max_deviation, dev);
    losses += program.probability(m) * line_losses(net, pf.l);
    mass += program.probability(m);
  }
  out.expected_losses_mw = mass > 0.0 ? losses / mass * sb : 0.0;
  out.cdf = empirical_cdf(out.scenario_max_deviation);
  return out;
}

}  // namespace

PolicyMetrics evaluate_policy(const program::StochasticProgram& program,
                              std::span<const double> pc_fixed, double K) {
  const auto& net = program.network();
  if (pc_fixed.size() != net.node_count())
    throw Error(ErrorCode::kBadParameter, "pc must have one entry per node");
  return run_power_flows(program, pc_fixed,
                         [&](std::size_t m, const std::vector<double>& w, std::vector<double>& qw) {
                           qw[0] = 0.0;
                           for (std::size_t u = 1; u < qw.size(); ++u) {
                             const int i = static_cast<int>(u);
                             const auto& nd = net.node(i);
                             const double p_c = nd.p_load + pc_fixed[u];
                             const double q_c = nd.q_load + nd.qc_slope * pc_fixed[u];
                             qw[u] = local_policy_qw(net, i, w[u], p_c, q_c, K,
                                                     program.qw_max(m, i));
                           }
                         });
}

PolicyMetrics evaluate_dispatch(const program::StochasticProgram& program,
                                const program::Solution& dispatch) {
  if (dispatch.scenarios.size() != program.scenario_count())
    throw Error(ErrorCode::kBadParameter, "dispatch and program differ in scenario count");
  return run_power_flows(program, dispatch.pc,
                         [&](std::size_t m, const std::vector<double>&, std::vector<double>& qw) {
                           qw = dispatch.scenarios[m].qw;
                         });
}

PolicyMetrics solution_metrics(const program::StochasticProgram& program,
                               const program::Solution& sol) {
  const auto& net = program.network();
  PolicyMetrics out;
  double losses = 0.0;
  for (std::size_t m = 0; m < sol.scenarios.size(); ++m) {
    const double dev = max_deviation(sol.scenarios[m].v);
    out.scenario_max_deviation.push_back(dev);
    out.max_deviation = std::max(out.max_deviation, dev);
    losses += program.probability(m) * line_losses(net, sol.scenarios[m].l);
    ++out.evaluated;
  }
  out.expected_losses_mw = losses * net.per_unit().s_base_mva;
  out.cdf = empirical_cdf(out.scenario_max_deviation);
  return out;
}

OnlineResult online_second_stage(const program::StochasticProgram& program,
                                 std::span<const double> pc_fixed,
                                 const admm::SolverConfig& config) {
  const auto& net = program.network();
  const std::size_t n = net.node_count();
  if (pc_fixed.size() != n)
    throw Error(ErrorCode::kBadParameter, "pc must have one entry per node");
  OnlineResult out;
  out.solution = program::make_empty_solution(n, program.scenario_count());
  out.solution.pc.assign(pc_fixed.begin(), pc_fixed.end());
  for (std::size_t m = 0; m < program.scenario_count(); ++m) {
    scenario::ScenarioSet single;
    single.seed = program.scenarios().seed;
    single.scenarios.push_back(program.scenarios().scenarios[m]);
    single.scenarios.back().probability = 1.0;
    const auto sub = program.with_scenarios(std::move(single));
    admm::SolverConfig cfg = config;
    cfg.fixed_pc = std::vector<double>(pc_fixed.begin(), pc_fixed.end());
    cfg.seed = derive_seed(config.seed, "online-scenario", m);
    const admm::SolveReport rep = admm::solve(sub, cfg);
    ScenarioOutcome oc;
    oc.converged = rep.converged;
    oc.iterations = rep.iterations;
    oc.final_r = rep.final_r;
    oc.final_s = rep.final_s;
    oc.final_gap = rep.final_gap;
    const auto audit = program::feasibility_audit(sub, rep.solution, 1e-4);
    for (const auto& f : audit.families) oc.audit_worst = std::max(oc.audit_worst, f.worst);
    oc.feasible = rep.converged && audit.pass;
    if (!oc.feasible) ++out.infeasible;
    out.outcomes.push_back(oc);
    out.solution.scenarios[m] = rep.solution.scenarios[0];
  }
  return out;
}

}  // namespace dsopf::baseline

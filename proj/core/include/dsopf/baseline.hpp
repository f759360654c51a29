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

#ifndef DSOPF_BASELINE_HPP
#define DSOPF_BASELINE_HPP

#include <span>
#include <vector>

#include "dsopf/admm.hpp"
#include "dsopf/network.hpp"
#include "dsopf/program.hpp"
#include "dsopf/scenario.hpp"

namespace dsopf::baseline {

/// Local volt/VAR rule using only quantities measured at the node:
///   clip(K F_L + (1 - K) F_V, +-qw_max),
///   F_L = clip(Qc), F_V = clip(Qc + x (Pc - w) / r).
/// Throws ZeroResistance when r = 0.
double local_policy_qw(double w, double p_c, double q_c, double K, double qw_max, double r,
                       double x);
/// Same rule with r, x taken from the node's line (per-unit inputs).
double local_policy_qw(const network::Network& net, int node, double w, double p_c,
                       double q_c, double K, double qw_max);

struct PowerFlowResult {
  std::vector<double> P, Q, v, l;  // per-unit, indexed by node
  bool converged = false;
  int iterations = 0;
  double max_balance_residual = 0.0;
};

/// Backward/forward sweep on the branch flow equations with l = (P^2 + Q^2) / v.
/// Convergence when the largest voltage change of a sweep drops below `tol`.
/// A non-converged result carries the last iterate.
PowerFlowResult radial_powerflow(const network::Network& net, std::span<const double> pc,
                                 std::span<const double> qw, std::span<const double> w,
                                 double tol = 1e-10, int max_iters = 200);

struct CdfPoint {
  double deviation = 0.0;
  double probability = 0.0;
};

struct PolicyMetrics {
  double expected_losses_mw = 0.0;
  /// max over evaluated scenarios and non-root nodes of |V - V0| / V0.
  double max_deviation = 0.0;
  std::vector<double> scenario_max_deviation;  // NaN where the power flow failed
  std::vector<CdfPoint> cdf;
  int evaluated = 0;
  int failed = 0;
};

/// Empirical CDF of the per-scenario maxima, skipping NaN entries.
std::vector<CdfPoint> empirical_cdf(std::span<const double> samples);

/// Local policy on each scenario of `program` (its scenario set is the test
/// set), followed by an exact power flow.
PolicyMetrics evaluate_policy(const program::StochasticProgram& program,
                              std::span<const double> pc_fixed, double K);

/// Exact power flow of a given dispatch (pc plus per-scenario qw).
PolicyMetrics evaluate_dispatch(const program::StochasticProgram& program,
                                const program::Solution& dispatch);

/// Voltage and loss metrics read directly from a solution's flows.
PolicyMetrics solution_metrics(const program::StochasticProgram& program,
                               const program::Solution& sol);

struct ScenarioOutcome {
  bool converged = false;
  bool feasible = false;
  int iterations = 0;
  double final_r = 0.0;
  double final_s = 0.0;
  double final_gap = 0.0;
  double audit_worst = 0.0;
};

struct OnlineResult {
  /// First stage pinned to pc_fixed; one scenario block per test scenario.
  program::Solution solution;
  std::vector<ScenarioOutcome> outcomes;
  int infeasible = 0;
};

/// Re-solves the second stage scenario by scenario with pc pinned. A
/// scenario is infeasible when its solve does not converge or its
/// solution fails the feasibility audit at 1e-4.
OnlineResult online_second_stage(const program::StochasticProgram& program,
                                 std::span<const double> pc_fixed,
                                 const admm::SolverConfig& config);

}  // namespace dsopf::baseline

#endif  // DSOPF_BASELINE_HPP

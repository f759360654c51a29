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

#ifndef DSOPF_PROGRAM_HPP
#define DSOPF_PROGRAM_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsopf/network.hpp"
#include "dsopf/scenario.hpp"

namespace dsopf::program {

/// Convex, differentiable substation cost C(P0) in physical units
/// (argument MW). `derivative` may be any monotone selection of the
/// subdifferential.
struct ConvexCost {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

struct ObjectiveConfig {
  double import_price = 0.0;  // a, per MW
  double export_price = 0.0;  // b, per MW; a >= b >= 0
  double loss_weight = 1.0;   // K_loss
  /// When set, P0 is a single variable priced by this cost and the
  /// a/b split is not used.
  std::optional<ConvexCost> general_cost;
};

void validate(const ObjectiveConfig& cfg);

/// Flows of one scenario in per-unit, indexed by node. Entry 0 holds the
/// substation: P[0] = P0, Q[0] = Q0, v[0] = v0, l[0] = 0.
struct ScenarioFlows {
  std::vector<double> P, Q, v, l, qw;
  double p0_plus = 0.0;
  double p0_minus = 0.0;
};

/// Candidate solution in per-unit; pc is first stage.
struct Solution {
  std::vector<double> pc;
  std::vector<ScenarioFlows> scenarios;
};

Solution make_empty_solution(std::size_t nodes, std::size_t scenarios);

class StochasticProgram {
 public:
  /// Throws ScenarioNetworkMismatch or InjectionExceedsNameplate.
  static StochasticProgram assemble(network::Network net, scenario::ScenarioSet scenarios,
                                    ObjectiveConfig objective);

  const network::Network& network() const { return net_; }
  const scenario::ScenarioSet& scenarios() const { return scenarios_; }
  const ObjectiveConfig& objective() const { return objective_; }

  std::size_t node_count() const { return net_.node_count(); }
  std::size_t scenario_count() const { return scenarios_.size(); }
  double probability(std::size_t m) const { return scenarios_.scenarios[m].probability; }
  /// Per-unit PV injection and reactive capability at (node, scenario).
  double injection(std::size_t m, int node) const { return w_[m * stride() + node]; }
  double qw_max(std::size_t m, int node) const { return qw_max_[m * stride() + node]; }
  double qc_slope(int node) const { return net_.node(node).qc_slope; }

  std::size_t first_stage_variable_count() const { return net_.line_count(); }
  /// P, Q, v, l, qw per user node and P0+, P0- per scenario.
  std::size_t second_stage_variable_count() const { return 5 * net_.line_count() + 2; }

  /// Same network and objective with a different scenario set.
  StochasticProgram with_scenarios(scenario::ScenarioSet scenarios) const;

 private:
  std::size_t stride() const { return net_.node_count(); }

  network::Network net_;
  scenario::ScenarioSet scenarios_;
  ObjectiveConfig objective_;
  std::vector<double> w_;
  std::vector<double> qw_max_;
};

/// Objective terms in the physical units of the formulation.
struct ObjectiveBreakdown {
  double negative_utility = 0.0;    // -sum u_i(pc_i)
  double expected_cost = 0.0;       // sum_m pi^m C(P0^m)
  double expected_losses_mw = 0.0;  // sum_m pi^m sum_i r_i l_i^m
  double loss_term = 0.0;           // K_loss * expected_losses_mw
  double total = 0.0;               // raw sum of the three weighted terms
};

ObjectiveBreakdown objective_breakdown(const StochasticProgram& program, const Solution& sol);
double objective_value(const StochasticProgram& program, const Solution& sol);

struct FamilyViolation {
  std::string name;
  double worst = 0.0;  // pu, 0 when satisfied
  int node = -1;
  int scenario = -1;
};

struct AuditReport {
  std::vector<FamilyViolation> families;
  /// max_{i,m} (v l - P^2 - Q^2); tightness of the relaxation, not a violation.
  double socp_gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  const FamilyViolation& family(const std::string& name) const;
};

AuditReport feasibility_audit(const StochasticProgram& program, const Solution& sol,
                              double tol);

/// max_m min(P0+^m, P0-^m) in per-unit.
double complementarity_check(const Solution& sol);

}  // namespace dsopf::program

#endif  // DSOPF_PROGRAM_HPP

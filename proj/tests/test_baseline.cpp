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

#include <cmath>
#include <random>

#include "dsopf/admm.hpp"
#include "dsopf/baseline.hpp"
#include "dsopf/error.hpp"
#include "dsopf/program.hpp"
#include "oracles/powerflow.hpp"
#include "support.hpp"

namespace dsopf {
namespace {

using program::StochasticProgram;

TEST(LocalPolicy, HandEvaluated) {
  EXPECT_NEAR(baseline::local_policy_qw(0.5, 0.2, 0.05, 1.5, 0.2, 1.0, 1.0), 0.175, 1e-15);
  // balanced real power: both setpoints are Qc
  for (double K : {-1.0, 0.3, 1.0, 2.5})
    EXPECT_NEAR(baseline::local_policy_qw(0.2, 0.2, 0.05, K, 0.2, 1.0, 3.0), 0.05, 1e-15);
  EXPECT_EQ(baseline::local_policy_qw(0.5, 0.2, 0.05, 1.5, 0.0, 1.0, 1.0), 0.0);
  EXPECT_THROW(baseline::local_policy_qw(0.5, 0.2, 0.05, 1.5, 0.2, 0.0, 1.0), Error);
}

TEST(LocalPolicy, StaysInCapability) {
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const double cap = std::abs(u(g));
    const double q = baseline::local_policy_qw(u(g), u(g), u(g), 5.0 * u(g), cap,
                                               0.1 + std::abs(u(g)), std::abs(u(g)));
    ASSERT_LE(std::abs(q), cap);
  }
}

TEST(PowerFlow, UnloadedFeeder) {
  testing::ChainOptions o;
  o.p_load_mw = 0.0;
  const auto net = testing::tree(4, {}, o);
  const std::vector<double> z(5, 0.0);
  const auto pf = baseline::radial_powerflow(net, z, z, z);
  ASSERT_TRUE(pf.converged);
  EXPECT_EQ(pf.iterations, 1);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(pf.v[i], net.v0());
    EXPECT_EQ(pf.P[i], 0.0);
    EXPECT_EQ(pf.l[i], 0.0);
  }
}

TEST(PowerFlow, SingleLineMatchesClosedForm) {
  // r = x = 0.01 pu, load (0.1, 0.05) pu
  testing::ChainOptions o;
  o.r_ohm = 0.01 * 51.84;
  o.x_ohm = 0.01 * 51.84;
  o.p_load_mw = 0.1;
  o.pf = 0.1 / std::hypot(0.1, 0.05);
  const auto net = testing::tree(1, {}, o);
  const std::vector<double> z(2, 0.0);
  const auto pf = baseline::radial_powerflow(net, z, z, z, 1e-14);
  ASSERT_TRUE(pf.converged);
  const auto ref = oracle::two_node_flow(1.0, 0.01, 0.01, 0.1, 0.05);
  EXPECT_NEAR(pf.v[1], ref.v1, 1e-12);
  EXPECT_NEAR(pf.l[1], ref.l, 1e-12);
  EXPECT_NEAR(pf.P[1], 0.1, 1e-12);
  EXPECT_NEAR(pf.Q[1], 0.05, 1e-12);
  EXPECT_NEAR(pf.P[0], 0.1 + 0.01 * ref.l, 1e-12);
}

TEST(PowerFlow, SatisfiesAuditedEquations) {
  const auto net = testing::tree(6, {0, 1, 2, 1, 4, 4});
  std::vector<double> pc(7, 0.02), qw(7, 0.01), w(7, 0.04);
  pc[0] = qw[0] = w[0] = 0.0;
  const double tol = 1e-10;
  const auto pf = baseline::radial_powerflow(net, pc, qw, w, tol);
  ASSERT_TRUE(pf.converged);
  EXPECT_LT(pf.max_balance_residual, 10 * tol);
  for (std::size_t i = 1; i < 7; ++i)
    EXPECT_LT(std::abs(pf.v[i] * pf.l[i] - pf.P[i] * pf.P[i] - pf.Q[i] * pf.Q[i]), 10 * tol);

  auto sol = program::make_empty_solution(7, 1);
  sol.pc = pc;
  auto& s = sol.scenarios[0];
  s.P = pf.P;
  s.Q = pf.Q;
  s.v = pf.v;
  s.l = pf.l;
  s.qw = qw;
  s.p0_plus = std::max(0.0, pf.P[0]);
  s.p0_minus = std::max(0.0, -pf.P[0]);
  const auto prog = StochasticProgram::assemble(net, testing::scenario_set({w}), {});
  const auto audit = program::feasibility_audit(prog, sol, 10 * tol);
  EXPECT_LT(audit.family("real_balance").worst, 10 * tol);
  EXPECT_LT(audit.family("reactive_balance").worst, 10 * tol);
  EXPECT_LT(audit.family("voltage_drop").worst, 10 * tol);
}

TEST(PowerFlow, DivergesOnImpossibleLoad) {
  testing::ChainOptions o;
  o.p_load_mw = 40.0;
  o.r_ohm = 20.0;
  o.x_ohm = 20.0;
  const auto net = testing::tree(3, {}, o);
  const std::vector<double> z(4, 0.0);
  const auto pf = baseline::radial_powerflow(net, z, z, z);
  EXPECT_FALSE(pf.converged);
}

TEST(Cdf, Properties) {
  const std::vector<double> xs{0.03, 0.01, NAN, 0.02, 0.01};
  const auto cdf = baseline::empirical_cdf(xs);
  ASSERT_EQ(cdf.size(), 3u);
  EXPECT_EQ(cdf[0].deviation, 0.01);
  EXPECT_DOUBLE_EQ(cdf[0].probability, 0.5);  // both ties counted at the jump
  EXPECT_DOUBLE_EQ(cdf[1].probability, 0.75);
  EXPECT_DOUBLE_EQ(cdf.back().probability, 1.0);
  for (std::size_t k = 1; k < cdf.size(); ++k) {
    EXPECT_GT(cdf[k].deviation, cdf[k - 1].deviation);
    EXPECT_GT(cdf[k].probability, cdf[k - 1].probability);
  }
  EXPECT_TRUE(baseline::empirical_cdf(std::vector<double>{}).empty());
}

TEST(Policy, NoCapabilityIsUncompensatedFlow) {
  testing::ChainOptions o;
  o.pv_mva = 0.0;
  const auto net = testing::tree(3, {}, o);
  const auto prog = StochasticProgram::assemble(net, testing::scenario_set({{0, 0, 0, 0}}), {});
  const std::vector<double> pc{0.0, 0.01, 0.02, 0.03};
  const auto m = baseline::evaluate_policy(prog, pc, 1.4);
  const auto pf = baseline::radial_powerflow(net, pc, std::vector<double>(4, 0.0),
                                             std::vector<double>(4, 0.0));
  ASSERT_EQ(m.evaluated, 1);
  double worst = 0.0, losses = 0.0;
  for (std::size_t i = 1; i < 4; ++i) {
    worst = std::max(worst, std::abs(std::sqrt(pf.v[i]) - 1.0));
    losses += net.line(static_cast<int>(i)).r * pf.l[i];
  }
  EXPECT_NEAR(m.max_deviation, worst, 1e-15);
  EXPECT_NEAR(m.expected_losses_mw, net.per_unit().power_from_pu(losses), 1e-15);
  EXPECT_EQ(m.cdf.size(), 1u);
}

TEST(Online, ReproducesFlowsWithPinnedConsumption) {
  const auto net = testing::tree(4, {0, 1, 2, 1});
  const auto prog = StochasticProgram::assemble(
      net, testing::scenario_set({{0, 0.05, 0.08, 0.0, 0.02}, {0, 0.0, 0.01, 0.09, 0.1}}), {});
  admm::SolverConfig cfg;
  cfg.rho = 2.0;
  cfg.rho_policy = admm::RhoPolicy::kFixed;
  cfg.max_iters = 100000;
  const auto first = admm::solve(prog, cfg);
  ASSERT_TRUE(first.converged);
  const auto online = baseline::online_second_stage(prog, first.solution.pc, cfg);
  EXPECT_EQ(online.infeasible, 0);
  ASSERT_EQ(online.outcomes.size(), 2u);
  for (const auto& o : online.outcomes) EXPECT_TRUE(o.converged && o.feasible);
  EXPECT_EQ(online.solution.pc, first.solution.pc);
  const double before = program::objective_breakdown(prog, first.solution).loss_term;
  const double after = program::objective_breakdown(prog, online.solution).loss_term;
  EXPECT_NEAR(after, before, 1e-4);

  // flows agree with the exact power flow at the re-solved dispatch
  const auto m = baseline::evaluate_dispatch(prog, online.solution);
  EXPECT_EQ(m.failed, 0);
  const auto direct = baseline::solution_metrics(prog, online.solution);
  EXPECT_NEAR(m.max_deviation, direct.max_deviation, 1e-3);
}

TEST(Online, ForcedZeroReactiveCanBeInfeasible) {
  testing::ChainOptions o;
  o.r_ohm = 1.0;
  o.x_ohm = 1.0;
  o.p_load_mw = 0.02;
  o.pc_max_mw = 0.0;
  o.pv_mva = 0.6;
  const auto net = testing::tree(3, {}, o);
  // heavy reverse flow pushes the far end over the band unless inverters absorb vars
  const auto prog = StochasticProgram::assemble(
      net, testing::scenario_set({{0, 0.55, 0.55, 0.55}}), {});
  admm::SolverConfig cfg;
  cfg.rho = 2.0;
  cfg.rho_policy = admm::RhoPolicy::kFixed;
  cfg.max_iters = 30000;
  const std::vector<double> pc(4, 0.0);
  const auto free = baseline::online_second_stage(prog, pc, cfg);
  cfg.force_qw_zero = true;
  const auto forced = baseline::online_second_stage(prog, pc, cfg);
  EXPECT_EQ(free.infeasible, 0);
  EXPECT_EQ(forced.infeasible, 1);
}

}  // namespace
}  // namespace dsopf

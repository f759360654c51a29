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

#ifndef DSOPF_ADMM_HPP
#define DSOPF_ADMM_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dsopf/closedform.hpp"
#include "dsopf/program.hpp"

namespace dsopf::admm {

enum class RhoPolicy { kFixed, kAdaptive };
enum class InitPolicy { kZeros, kRandom };

struct SolverConfig {
  double rho = 100.0;
  RhoPolicy rho_policy = RhoPolicy::kAdaptive;
  double eps_primal = 1e-5;
  double eps_dual = 1e-5;
  double socp_gap_tol = 1e-3;  // pu^2
  int max_iters = 20000;
  InitPolicy init_policy = InitPolicy::kRandom;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  /// Pins the first-stage consumption (per node, per-unit); p~c is then a
  /// constant instead of a z-variable.
  std::optional<std::vector<double>> fixed_pc;
  /// Restricts every inverter to q_w = 0.
  bool force_qw_zero = false;
};

void validate(const SolverConfig& cfg);

enum class Role { kRoot, kInternal, kLeaf };

/// x-variables of one node in one scenario. `hat` holds (P^, Q^, l^) for
/// each child in network child order. Root blocks use only the P0 fields.
struct XBlock {
  double P = 0.0, Q = 0.0, v = 0.0, l = 0.0, v_hat = 0.0, pc = 0.0, qw = 0.0;
  double p0 = 0.0, p0_plus = 0.0, p0_minus = 0.0;
  std::vector<double> hat;
};

/// z-variables of one node in one scenario (p~c is stored per node).
struct ZBlock {
  double P = 0.0, Q = 0.0, v = 0.0, l = 0.0, qw = 0.0;
  double p0 = 0.0, p0_plus = 0.0, p0_minus = 0.0;
};

/// Multipliers owned by the x-side of one node in one scenario. `hat`
/// holds (lambda^, mu^, gamma^) per child; omega_hat couples v^ of this
/// node to v~ of its ancestor.
struct YBlock {
  double lambda = 0.0, mu = 0.0, gamma = 0.0, omega = 0.0, omega_hat = 0.0;
  double eta = 0.0, theta = 0.0;
  double zeta = 0.0, zeta_plus = 0.0, zeta_minus = 0.0;
  std::vector<double> hat;
};

struct AdmmState {
  std::size_t nodes = 0;
  std::size_t scenarios = 0;
  std::vector<XBlock> x;  // node-major: index node * scenarios + m
  std::vector<ZBlock> z;
  std::vector<YBlock> y;
  std::vector<double> pc_tilde;  // per node
  double rho = 0.0;
  int iteration = 0;

  std::size_t index(int node, std::size_t m) const {
    return static_cast<std::size_t>(node) * scenarios + m;
  }
  XBlock& x_at(int node, std::size_t m) { return x[index(node, m)]; }
  const XBlock& x_at(int node, std::size_t m) const { return x[index(node, m)]; }
  ZBlock& z_at(int node, std::size_t m) { return z[index(node, m)]; }
  const ZBlock& z_at(int node, std::size_t m) const { return z[index(node, m)]; }
  YBlock& y_at(int node, std::size_t m) { return y[index(node, m)]; }
  const YBlock& y_at(int node, std::size_t m) const { return y[index(node, m)]; }
};

struct Residuals {
  double r = 0.0;
  double s = 0.0;
};

enum class Phase { kX, kZ, kMultiplier };

/// Records which node's data each update touched. Attach to a Solver to
/// audit message locality.
class AccessLog {
 public:
  struct Entry {
    Phase phase;
    int reader;
    int owner;
  };
  void record(Phase phase, int reader, int owner);
  std::vector<Entry> entries() const;
  void clear();

 private:
  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
};

struct Trace {
  std::vector<double> r, s, objective, gap, rho;
};

struct PhaseTimes {
  double x_seconds = 0.0;
  double z_seconds = 0.0;
  double multiplier_seconds = 0.0;
  double residual_seconds = 0.0;
};

struct SolveReport {
  program::Solution solution;  // consensus (tilde) values, per-unit
  Trace trace;
  int iterations = 0;
  bool converged = false;
  double final_r = 0.0;
  double final_s = 0.0;
  double final_gap = 0.0;
  double final_rho = 0.0;
  PhaseTimes times;
};

/// One ADMM instance bound to a program. Update methods are exposed
/// individually so each phase can be checked against an oracle.
class Solver {
 public:
  Solver(const program::StochasticProgram& program, SolverConfig config);
  ~Solver();

  const program::StochasticProgram& program() const { return program_; }
  const SolverConfig& config() const { return config_; }

  Role role(int node) const;
  /// Length of x_i^m for this node's role.
  std::size_t x_dimension(int node) const;

  AdmmState init_state() const;

  /// Equality QP solved by the x-step of (node, m) at the current state.
  closedform::EqQpInstance x_instance(const AdmmState& state, int node, std::size_t m) const;
  void x_update(AdmmState& state, int node, std::size_t m) const;

  /// Cone-box data of the (P~, Q~, v~, l~) update of (node, m).
  closedform::FlowConsensus flow_instance(const AdmmState& state, int node,
                                          std::size_t m) const;
  /// All z-variables of one node across scenarios, p~c included.
  void z_update(AdmmState& state, int node) const;

  void multiplier_update(AdmmState& state) const;
  Residuals residuals(const AdmmState& state, const std::vector<ZBlock>& prev_z,
                      const std::vector<double>& prev_pc_tilde) const;
  /// max_{i,m} (v~ l~ - P~^2 - Q~^2).
  double socp_gap(const AdmmState& state) const;
  /// Objective at the consensus values, physical units.
  double objective(const AdmmState& state) const;
  program::Solution extract_solution(const AdmmState& state) const;

  /// Runs one full round: x-phase, z-phase, multipliers. Returns residuals.
  Residuals iterate(AdmmState& state) const;
  SolveReport solve() const;
  SolveReport solve(AdmmState& state) const;

  void set_access_log(AccessLog* log) { log_ = log; }

 private:
  struct Impl;
  void x_phase(AdmmState& state) const;
  void z_phase(AdmmState& state) const;

  const program::StochasticProgram& program_;
  SolverConfig config_;
  std::unique_ptr<Impl> impl_;
  AccessLog* log_ = nullptr;
};

double adapt_rho(double rho, double r, double s);

AdmmState init_state(const program::StochasticProgram& program, const SolverConfig& config);
SolveReport solve(const program::StochasticProgram& program, const SolverConfig& config);

}  // namespace dsopf::admm

#endif  // DSOPF_ADMM_HPP

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

#ifndef DSOPF_CLOSEDFORM_HPP
#define DSOPF_CLOSEDFORM_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dsopf::closedform {

// ---------------------------------------------------------------------------
// Equality-constrained QP with diagonal Hessian:
//
//   minimize 1/2 x'Ax + b'x   subject to  Cx = d,   A = diag(a), a > 0.
//
// Solved through the Schur complement S = C A^-1 C':
//   F = S^-1 (d + C A^-1 b),   x = A^-1 (-b + C'F).
// ---------------------------------------------------------------------------

struct EqQpInstance {
  std::vector<double> a_diag;
  std::vector<double> b;
  std::vector<double> c;  // rows x n, row-major
  std::vector<double> d;

  std::size_t rows() const { return d.size(); }
  std::size_t cols() const { return a_diag.size(); }
};

/// Scratch buffers reused across solves of similar size.
struct EqQpWorkspace {
  std::vector<double> scaled_b;
  std::vector<double> schur;
  std::vector<double> rhs;
};

/// Throws RankDeficient when rows of C are dependent and SingularSchur when
/// S is too ill-conditioned to factor reliably.
std::vector<double> solve_equality_qp(const EqQpInstance& qp);

void solve_equality_qp(std::span<const double> a_diag, std::span<const double> b,
                       std::span<const double> c, std::span<const double> d,
                       std::span<double> x, EqQpWorkspace& ws);

// ---------------------------------------------------------------------------
// Four-variable cone-box projection:
//
//   minimize  sum_i z_i^2 + c_i z_i
//   s.t.      z3_min <= z3 <= z3_max
//             (z1^2 + z2^2) / z3 <= k2 * z4
//             z4 <= z4_max
//
// KKT multipliers: lambda_min / lambda_max on the z3 bounds, mu on the cone,
// gamma on the z4 cap.
// ---------------------------------------------------------------------------

struct ConeBoxInstance {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  double k2 = 1.0;
  double z3_min = 1.0, z3_max = 1.0;
  double z4_max = 1.0;
};

enum class ConeBoxBranch {
  kInactive,          // mu = 0, gamma = 0
  kCapOnly,           // mu = 0, gamma > 0
  kConeInterior,      // gamma = 0, mu > 0, z3 strictly inside its bounds
  kConeAtMin,         // gamma = 0, mu > 0, z3 = z3_min
  kConeAtMax,         // gamma = 0, mu > 0, z3 = z3_max
  kConeCapInterior,   // gamma > 0, mu > 0, z3 inside
  kConeCapAtMin,      // gamma > 0, mu > 0, z3 = z3_min
  kConeCapAtMax,      // gamma > 0, mu > 0, z3 = z3_max
};
inline constexpr std::size_t kConeBoxBranchCount = 8;

std::string_view to_string(ConeBoxBranch branch);

struct ConeBoxResult {
  double z1 = 0.0, z2 = 0.0, z3 = 0.0, z4 = 0.0;
  double mu = 0.0;
  double gamma = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  ConeBoxBranch branch = ConeBoxBranch::kInactive;
};

/// Throws BadParameter on an invalid instance and NoKktCase (with a JSON
/// dump of the instance) if no branch satisfies the KKT system.
ConeBoxResult project_cone_box(const ConeBoxInstance& inst);

double cone_box_objective(const ConeBoxInstance& inst, double z1, double z2, double z3,
                          double z4);

/// Largest absolute KKT residual (stationarity, complementarity, sign and
/// primal feasibility) of a candidate with its multipliers.
double cone_box_kkt_residual(const ConeBoxInstance& inst, const ConeBoxResult& r);

std::string dump_json(const ConeBoxInstance& inst);

/// Consensus update of one node's (P, Q, v, l) copies. The per-unit objective
///   P^2 + c_p P + Q^2 + c_q Q + (1 + |C|)/2 v^2 + c_v v + l^2 + c_l l
/// is mapped onto the cone-box form through z3 = sqrt((1 + |C|)/2) v.
struct FlowConsensus {
  double c_p = 0.0, c_q = 0.0, c_v = 0.0, c_l = 0.0;
  std::size_t child_count = 0;
  double v_min = 0.0, v_max = 0.0;
  double l_max = 0.0;
};

struct FlowProjection {
  double p = 0.0, q = 0.0, v = 0.0, l = 0.0;
  ConeBoxBranch branch = ConeBoxBranch::kInactive;
};

ConeBoxInstance to_cone_box(const FlowConsensus& in);
FlowProjection project_flow_consensus(const FlowConsensus& in);

// ---------------------------------------------------------------------------
// Scalar updates.
// ---------------------------------------------------------------------------

/// [t]_{lo}^{hi} = max(lo, min(t, hi)); throws BadBounds when lo > hi.
double box_project(double value, double lo, double hi);
/// [t]^+ = max(0, t).
double positive_part(double value);

/// Consensus value of the elastic load across scenarios:
///   argmin_{pc_min <= p <= pc_max}  K_u (p - pc_max)^2
///        + sum_m eta_m (pc_m - p) + rho/2 sum_m (pc_m - p)^2.
double update_pc_tilde(double utility_weight, double pc_max, double pc_min,
                       std::span<const double> eta, std::span<const double> pc_copies,
                       double rho);

/// Solves p + weight * g(p) = center for a nondecreasing g, i.e. the
/// proximal point of a convex function with (sub)derivative g.
double scalar_prox(const std::function<double(double)>& derivative, double center,
                   double weight);

}  // namespace dsopf::closedform

#endif  // DSOPF_CLOSEDFORM_HPP

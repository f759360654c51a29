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


#ifndef DSOPF_TESTS_ORACLES_COUPLING_HPP
#define DSOPF_TESTS_ORACLES_COUPLING_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <string>
#include <vector>

#include "dense_kkt.hpp"
#include "dsopf/admm.hpp"
#include "dsopf/program.hpp"

// Explicit matrix form of the consensus constraints A x + B z = c, assembled
// from the model description rather than from the solver's loops.
namespace dsopf::oracle {

// Which x-side variable a coupling row constrains.
enum class XVar { kP, kQ, kV, kL, kVHat, kPc, kQw, kP0Plus, kP0Minus, kHatP, kHatQ, kHatL };

struct CouplingRow {
  int node = 0;
  std::size_t m = 0;
  XVar var = XVar::kP;
  int child_slot = -1;  // for hatted copies
};

struct CouplingSystem {
  std::vector<CouplingRow> rows;
  Eigen::SparseMatrix<double> A, B;
  Eigen::VectorXd c, x, z, y;

  Eigen::VectorXd residual() const { return A * x + B * z - c; }
};

namespace detail {

template <typename Block>
auto& x_field(Block& b, const CouplingRow& r) {
  switch (r.var) {
    case XVar::kP: return b.P;
    case XVar::kQ: return b.Q;
    case XVar::kV: return b.v;
    case XVar::kL: return b.l;
    case XVar::kVHat: return b.v_hat;
    case XVar::kPc: return b.pc;
    case XVar::kQw: return b.qw;
    case XVar::kP0Plus: return b.p0_plus;
    case XVar::kP0Minus: return b.p0_minus;
    case XVar::kHatP: return b.hat[3 * r.child_slot];
    case XVar::kHatQ: return b.hat[3 * r.child_slot + 1];
    case XVar::kHatL: return b.hat[3 * r.child_slot + 2];
  }
  return b.P;
}

template <typename Block>
auto& y_field(Block& b, const CouplingRow& r) {
  switch (r.var) {
    case XVar::kP: return b.lambda;
    case XVar::kQ: return b.mu;
    case XVar::kV: return b.omega;
    case XVar::kL: return b.gamma;
    case XVar::kVHat: return b.omega_hat;
    case XVar::kPc: return b.eta;
    case XVar::kQw: return b.theta;
    case XVar::kP0Plus: return b.zeta_plus;
    case XVar::kP0Minus: return b.zeta_minus;
    case XVar::kHatP: return b.hat[3 * r.child_slot];
    case XVar::kHatQ: return b.hat[3 * r.child_slot + 1];
    case XVar::kHatL: return b.hat[3 * r.child_slot + 2];
  }
  return b.lambda;
}

}  // namespace detail

inline double multiplier(const admm::AdmmState& st, const CouplingRow& r) {
  return detail::y_field(st.y_at(r.node, r.m), r);
}

// z columns: per (node, m) the five flow variables, root P0+/P0-, then one
// p~c per node. With `fixed_pc` the p~c targets move into c.
inline CouplingSystem assemble_couplings(const program::StochasticProgram& prog,
                                         const admm::AdmmState& st,
                                         const std::vector<double>* fixed_pc = nullptr) {
  const auto& net = prog.network();
  const int N = static_cast<int>(net.node_count());
  const std::size_t M = st.scenarios;
  enum ZSlot { zP, zQ, zV, zL, zQw, zP0p, zP0m, kSlots };
  auto zcol = [&](int i, std::size_t m, int slot) {
    return static_cast<int>((static_cast<std::size_t>(i) * M + m) * kSlots + slot);
  };
  const int pc_base = N * static_cast<int>(M) * kSlots;
  const int nz = pc_base + N;

  CouplingSystem sys;
  std::vector<Eigen::Triplet<double>> ta, tb;
  std::vector<double> cvals, xvals, yvals;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(nz);
  for (int i = 0; i < N; ++i) {
    for (std::size_t m = 0; m < M; ++m) {
      const auto& zb = st.z_at(i, m);
      z(zcol(i, m, zP)) = zb.P;
      z(zcol(i, m, zQ)) = zb.Q;
      z(zcol(i, m, zV)) = zb.v;
      z(zcol(i, m, zL)) = zb.l;
      z(zcol(i, m, zQw)) = zb.qw;
      z(zcol(i, m, zP0p)) = zb.p0_plus;
      z(zcol(i, m, zP0m)) = zb.p0_minus;
    }
    z(pc_base + i) = st.pc_tilde[static_cast<std::size_t>(i)];
  }

  auto add = [&](CouplingRow row, int zc, double constant) {
    const int r = static_cast<int>(sys.rows.size());
    ta.emplace_back(r, r, 1.0);  // every x copy appears in exactly one row
    if (zc >= 0) tb.emplace_back(r, zc, -1.0);
    cvals.push_back(constant);
    xvals.push_back(detail::x_field(st.x_at(row.node, row.m), row));
    yvals.push_back(multiplier(st, row));
    sys.rows.push_back(row);
  };

  for (int i = 0; i < N; ++i) {
    for (std::size_t m = 0; m < M; ++m) {
      if (i == 0) {
        add({0, m, XVar::kP0Plus}, zcol(0, m, zP0p), 0.0);
        add({0, m, XVar::kP0Minus}, zcol(0, m, zP0m), 0.0);
      } else {
        const int a = net.ancestor(i);
        add({i, m, XVar::kP}, zcol(i, m, zP), 0.0);
        add({i, m, XVar::kQ}, zcol(i, m, zQ), 0.0);
        add({i, m, XVar::kL}, zcol(i, m, zL), 0.0);
        add({i, m, XVar::kV}, zcol(i, m, zV), 0.0);
        if (a == 0)
          add({i, m, XVar::kVHat}, -1, net.v0());
        else
          add({i, m, XVar::kVHat}, zcol(a, m, zV), 0.0);
        if (fixed_pc)
          add({i, m, XVar::kPc}, -1, (*fixed_pc)[static_cast<std::size_t>(i)]);
        else
          add({i, m, XVar::kPc}, pc_base + i, 0.0);
        add({i, m, XVar::kQw}, zcol(i, m, zQw), 0.0);
      }
      const auto kids = net.children(i);
      for (std::size_t k = 0; k < kids.size(); ++k) {
        const int s = static_cast<int>(k);
        add({i, m, XVar::kHatP, s}, zcol(kids[k], m, zP), 0.0);
        add({i, m, XVar::kHatQ, s}, zcol(kids[k], m, zQ), 0.0);
        add({i, m, XVar::kHatL, s}, zcol(kids[k], m, zL), 0.0);
      }
    }
  }
  const int rows = static_cast<int>(sys.rows.size());
  sys.A.resize(rows, rows);
  sys.A.setFromTriplets(ta.begin(), ta.end());
  sys.B.resize(rows, nz);
  sys.B.setFromTriplets(tb.begin(), tb.end());
  sys.c = Eigen::Map<Eigen::VectorXd>(cvals.data(), rows);
  sys.x = Eigen::Map<Eigen::VectorXd>(xvals.data(), rows);
  sys.y = Eigen::Map<Eigen::VectorXd>(yvals.data(), rows);
  sys.z = z;
  return sys;
}

// Dual residual rho * ||A' B (z - z_prev)||.
inline double dual_residual(const CouplingSystem& now, const CouplingSystem& before, double rho) {
  const Eigen::VectorXd dz = now.z - before.z;
  const Eigen::VectorXd g = now.A.transpose() * (now.B * dz);
  return rho * g.norm();
}

// x-step of (node, m) written from the augmented Lagrangian: for every row
// the node owns, y (x - t) + rho/2 (x - t)^2, plus the node's cost, minimized
// subject to the local power-flow rows. Variables are in CouplingRow order.
struct XStepSolution {
  std::vector<CouplingRow> vars;
  std::vector<double> values;
};

inline XStepSolution x_step(const program::StochasticProgram& prog, const admm::AdmmState& st,
                            int node, std::size_t m, const std::vector<double>* fixed_pc = nullptr) {
  const CouplingSystem sys = assemble_couplings(prog, st, fixed_pc);
  const auto& net = prog.network();
  const double rho = st.rho;
  const double pi = prog.probability(m);
  XStepSolution out;
  std::vector<double> a, b;
  const Eigen::VectorXd target = -(sys.B * sys.z - sys.c);  // x - target is the residual
  for (std::size_t r = 0; r < sys.rows.size(); ++r) {
    const auto& row = sys.rows[r];
    if (row.node != node || row.m != m) continue;
    out.vars.push_back(row);
    a.push_back(rho);
    double lin = sys.y(static_cast<Eigen::Index>(r)) - rho * target(static_cast<Eigen::Index>(r));
    if (row.var == XVar::kL) lin += pi * prog.objective().loss_weight * net.line(node).r;
    if (row.var == XVar::kP0Plus) lin += pi * prog.objective().import_price;
    if (row.var == XVar::kP0Minus) lin -= pi * prog.objective().export_price;
    b.push_back(lin);
  }
  const std::size_t n = out.vars.size();
  auto col = [&](XVar v, int slot = -1) {
    for (std::size_t k = 0; k < n; ++k)
      if (out.vars[k].var == v && out.vars[k].child_slot == slot) return k;
    return n;
  };
  std::vector<std::vector<double>> rows;
  std::vector<double> d;
  const auto kids = net.children(node);
  if (node == 0) {
    std::vector<double> row(n, 0.0);
    row[col(XVar::kP0Plus)] = 1.0;
    row[col(XVar::kP0Minus)] = -1.0;
    for (std::size_t k = 0; k < kids.size(); ++k) {
      row[col(XVar::kHatP, static_cast<int>(k))] = -1.0;
      row[col(XVar::kHatL, static_cast<int>(k))] = -net.line(kids[k]).r;
    }
    rows.push_back(row);
    d.push_back(0.0);
  } else {
    const auto& nd = net.node(node);
    const auto& ln = net.line(node);
    std::vector<double> real(n, 0.0), reac(n, 0.0), drop(n, 0.0);
    real[col(XVar::kP)] = 1.0;
    real[col(XVar::kPc)] = -1.0;
    reac[col(XVar::kQ)] = 1.0;
    reac[col(XVar::kPc)] = -nd.qc_slope;
    reac[col(XVar::kQw)] = 1.0;
    reac[col(XVar::kV)] = nd.q_s;
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const auto& lj = net.line(kids[k]);
      real[col(XVar::kHatP, static_cast<int>(k))] = -1.0;
      real[col(XVar::kHatL, static_cast<int>(k))] = -lj.r;
      reac[col(XVar::kHatQ, static_cast<int>(k))] = -1.0;
      reac[col(XVar::kHatL, static_cast<int>(k))] = -lj.x;
    }
    drop[col(XVar::kVHat)] = 1.0;
    drop[col(XVar::kV)] = -1.0;
    drop[col(XVar::kP)] = -2.0 * ln.r;
    drop[col(XVar::kQ)] = -2.0 * ln.x;
    drop[col(XVar::kL)] = -(ln.r * ln.r + ln.x * ln.x);
    rows = {real, reac, drop};
    d = {nd.p_load - prog.injection(m, node), nd.q_load, 0.0};
  }
  std::vector<double> c;
  for (const auto& r : rows) c.insert(c.end(), r.begin(), r.end());
  out.values = dense_kkt(a, b, c, d);
  return out;
}

inline double x_value(const admm::AdmmState& st, const CouplingRow& r) {
  return detail::x_field(st.x_at(r.node, r.m), r);
}

inline double y_value(const admm::AdmmState& st, const CouplingRow& r) { return multiplier(st, r); }

}  // namespace dsopf::oracle

#endif  // DSOPF_TESTS_ORACLES_COUPLING_HPP

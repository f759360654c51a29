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

#include "dsopf/admm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dsopf/error.hpp"
#include "dsopf/parallel.hpp"
#include "dsopf/random.hpp"

namespace dsopf::admm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string strip_code(const Error& e) {
  const std::string what = e.what();
  const auto pos = what.find(": ");
  return pos == std::string::npos ? what : what.substr(pos + 2);
}

// Column layout of x_i^m.
constexpr std::size_t kP = 0, kQ = 1, kV = 2, kL = 3, kVHat = 4, kPc = 5, kQw = 6;
constexpr std::size_t kNodeFixed = 7;

struct Scratch {
  closedform::EqQpWorkspace ws;
  std::vector<double> a, b, d, x;
};

struct NodePartial {
  double r2 = 0.0;
  double s2 = 0.0;
  double gap = -std::numeric_limits<double>::infinity();
  double objective = 0.0;
};

}  // namespace

void AccessLog::record(Phase phase, int reader, int owner) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.push_back({phase, reader, owner});
}

std::vector<AccessLog::Entry> AccessLog::entries() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_;
}

void AccessLog::clear() {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.clear();
}

void validate(const SolverConfig& cfg) {
  if (!(cfg.rho > 0.0) || !std::isfinite(cfg.rho))
    throw Error(ErrorCode::kBadParameter, "rho must be positive");
  if (!(cfg.eps_primal > 0.0) || !(cfg.eps_dual > 0.0) || !(cfg.socp_gap_tol > 0.0))
    throw Error(ErrorCode::kBadParameter, "tolerances must be positive");
  if (cfg.max_iters < 1) throw Error(ErrorCode::kBadParameter, "max_iters must be >= 1");
}

double adapt_rho(double rho, double r, double s) {
  if (r > 10.0 * s) return 2.0 * rho;
  if (s > 10.0 * r) return 0.5 * rho;
  return rho;
}

struct Solver::Impl {
  std::vector<int> child_slot;          // position of a node among its ancestor's children
  std::vector<std::vector<double>> c;   // per node, rows x dim, row-major
  std::vector<std::size_t> rows;
  std::vector<std::size_t> dim;
  bool general_cost = false;
  mutable WorkerPool pool;
  mutable std::vector<Scratch> scratch;
  mutable std::vector<NodePartial> partial;

  explicit Impl(std::size_t workers) : pool(workers), scratch(pool.size()) {}
};

Solver::~Solver() = default;

Solver::Solver(const program::StochasticProgram& program, SolverConfig config)
    : program_(program), config_(std::move(config)) {
  validate(config_);
  const auto& net = program_.network();
  const std::size_t n = net.node_count();
  if (config_.fixed_pc && config_.fixed_pc->size() != n)
    throw Error(ErrorCode::kBadParameter, "fixed_pc must have one entry per node");
  impl_ = std::make_unique<Impl>(config_.workers);
  impl_->general_cost = program_.objective().general_cost.has_value();
  impl_->child_slot.assign(n, -1);
  impl_->c.resize(n);
  impl_->rows.resize(n);
  impl_->dim.resize(n);
  impl_->partial.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    const int i = static_cast<int>(u);
    const auto kids = net.children(i);
    for (std::size_t k = 0; k < kids.size(); ++k) impl_->child_slot[kids[k]] = static_cast<int>(k);
    const std::size_t d = x_dimension(i);
    impl_->dim[u] = d;
    if (i == 0) {
      // P0+ - P0- (or P0) - sum_j (P^_j + r_j l^_j) = 0
      const std::size_t base = impl_->general_cost ? 1 : 2;
      std::vector<double> row(d, 0.0);
      row[0] = 1.0;
      if (!impl_->general_cost) row[1] = -1.0;
      for (std::size_t k = 0; k < kids.size(); ++k) {
        row[base + 3 * k] = -1.0;
        row[base + 3 * k + 2] = -net.line(kids[k]).r;
      }
      impl_->rows[u] = 1;
      impl_->c[u] = std::move(row);
      continue;
    }
    const auto& nd = net.node(i);
    const auto& ln = net.line(i);
    std::vector<double> c(3 * d, 0.0);
    double* r0 = c.data();
    double* r1 = c.data() + d;
    double* r2 = c.data() + 2 * d;
    r0[kP] = 1.0;
    r0[kPc] = -1.0;
    r1[kQ] = 1.0;
    r1[kPc] = -nd.qc_slope;
    r1[kQw] = 1.0;
    r1[kV] = nd.q_s;
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const auto& lj = net.line(kids[k]);
      r0[kNodeFixed + 3 * k] = -1.0;
      r0[kNodeFixed + 3 * k + 2] = -lj.r;
      r1[kNodeFixed + 3 * k + 1] = -1.0;
      r1[kNodeFixed + 3 * k + 2] = -lj.x;
    }
    r2[kVHat] = 1.0;
    r2[kV] = -1.0;
    r2[kP] = -2.0 * ln.r;
    r2[kQ] = -2.0 * ln.x;
    r2[kL] = -(ln.r * ln.r + ln.x * ln.x);
    impl_->rows[u] = 3;
    impl_->c[u] = std::move(c);
  }
}

Role Solver::role(int node) const {
  if (node == 0) return Role::kRoot;
  return program_.network().is_leaf(node) ? Role::kLeaf : Role::kInternal;
}

std::size_t Solver::x_dimension(int node) const {
  const std::size_t kids = program_.network().children(node).size();
  if (node == 0) return (program_.objective().general_cost ? 1 : 2) + 3 * kids;
  return kNodeFixed + 3 * kids;
}

AdmmState Solver::init_state() const {
  const auto& net = program_.network();
  AdmmState st;
  st.nodes = net.node_count();
  st.scenarios = program_.scenario_count();
  st.rho = config_.rho;
  st.x.resize(st.nodes * st.scenarios);
  st.z.resize(st.nodes * st.scenarios);
  st.y.resize(st.nodes * st.scenarios);
  st.pc_tilde.assign(st.nodes, 0.0);

  const bool random = config_.init_policy == InitPolicy::kRandom;
  std::mt19937_64 rng(derive_seed(config_.seed, "admm-init", 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] { return random ? unit(rng) : 0.0; };

  for (std::size_t u = 0; u < st.nodes; ++u) {
    const int i = static_cast<int>(u);
    const std::size_t kids = net.children(i).size();
    if (i != 0) st.pc_tilde[u] = draw();
    for (std::size_t m = 0; m < st.scenarios; ++m) {
      auto& x = st.x_at(i, m);
      auto& z = st.z_at(i, m);
      auto& y = st.y_at(i, m);
      x.hat.assign(3 * kids, 0.0);
      y.hat.assign(3 * kids, 0.0);
      if (i == 0) {
        z.p0_plus = draw();
        z.p0_minus = draw();
        z.p0 = draw();
        y.zeta_plus = draw();
        y.zeta_minus = draw();
        y.zeta = draw();
      } else {
        z.P = draw();
        z.Q = draw();
        z.v = draw();
        z.l = draw();
        z.qw = draw();
        y.lambda = draw();
        y.mu = draw();
        y.gamma = draw();
        y.omega = draw();
        y.omega_hat = draw();
        y.eta = draw();
        y.theta = draw();
        if (config_.force_qw_zero) z.qw = 0.0;
      }
      for (double& h : y.hat) h = draw();
    }
  }
  if (config_.fixed_pc) st.pc_tilde = *config_.fixed_pc;
  st.pc_tilde[0] = 0.0;
  return st;
}

namespace {

// Fills A, b and d of the x-step for (i, m). Reads only z and y of the
// node's neighbourhood; each access is reported through `seen`.
template <typename Seen>
void fill_x_problem(const program::StochasticProgram& prog, const AdmmState& st, int i,
                    std::size_t m, bool general_cost, std::vector<double>& a,
                    std::vector<double>& b, std::vector<double>& d, Seen&& seen) {
  const auto& net = prog.network();
  const auto kids = net.children(i);
  const double rho = st.rho;
  const double pi = prog.probability(m);
  const auto& y = st.y_at(i, m);
  seen(i);
  const std::size_t base = i == 0 ? (general_cost ? 1 : 2) : kNodeFixed;
  const std::size_t n = base + 3 * kids.size();
  a.assign(n, rho);
  b.assign(n, 0.0);

  if (i == 0) {
    const auto& z = st.z_at(0, m);
    if (general_cost) {
      b[0] = y.zeta - rho * z.p0;
    } else {
      const auto& obj = prog.objective();
      b[0] = y.zeta_plus - rho * z.p0_plus + pi * obj.import_price;
      b[1] = y.zeta_minus - rho * z.p0_minus - pi * obj.export_price;
    }
    d.assign(1, 0.0);
  } else {
    const auto& z = st.z_at(i, m);
    const int parent = net.ancestor(i);
    seen(parent);
    const double v_parent = parent == 0 ? net.v0() : st.z_at(parent, m).v;
    const auto& nd = net.node(i);
    b[kP] = y.lambda - rho * z.P;
    b[kQ] = y.mu - rho * z.Q;
    b[kV] = y.omega - rho * z.v;
    b[kL] = y.gamma - rho * z.l + pi * prog.objective().loss_weight * net.line(i).r;
    b[kVHat] = y.omega_hat - rho * v_parent;
    b[kPc] = y.eta - rho * st.pc_tilde[static_cast<std::size_t>(i)];
    b[kQw] = y.theta - rho * z.qw;
    d.assign(3, 0.0);
    d[0] = nd.p_load - prog.injection(m, i);
    d[1] = nd.q_load;
  }
  for (std::size_t k = 0; k < kids.size(); ++k) {
    seen(kids[k]);
    const auto& zj = st.z_at(kids[k], m);
    b[base + 3 * k] = y.hat[3 * k] - rho * zj.P;
    b[base + 3 * k + 1] = y.hat[3 * k + 1] - rho * zj.Q;
    b[base + 3 * k + 2] = y.hat[3 * k + 2] - rho * zj.l;
  }
}

void scatter_x(const std::vector<double>& xs, int i, bool general_cost, XBlock& x) {
  std::size_t base;
  if (i == 0) {
    if (general_cost) {
      x.p0 = xs[0];
      base = 1;
    } else {
      x.p0_plus = xs[0];
      x.p0_minus = xs[1];
      x.p0 = xs[0] - xs[1];
      base = 2;
    }
  } else {
    x.P = xs[kP];
    x.Q = xs[kQ];
    x.v = xs[kV];
    x.l = xs[kL];
    x.v_hat = xs[kVHat];
    x.pc = xs[kPc];
    x.qw = xs[kQw];
    base = kNodeFixed;
  }
  std::copy(xs.begin() + static_cast<std::ptrdiff_t>(base), xs.end(), x.hat.begin());
}

}  // namespace

closedform::EqQpInstance Solver::x_instance(const AdmmState& state, int node,
                                            std::size_t m) const {
  closedform::EqQpInstance qp;
  fill_x_problem(program_, state, node, m, impl_->general_cost, qp.a_diag, qp.b, qp.d,
                 [](int) {});
  qp.c = impl_->c[static_cast<std::size_t>(node)];
  return qp;
}

void Solver::x_update(AdmmState& state, int node, std::size_t m) const {
  Scratch sc;
  auto seen = [&](int owner) {
    if (log_) log_->record(Phase::kX, node, owner);
  };
  fill_x_problem(program_, state, node, m, impl_->general_cost, sc.a, sc.b, sc.d, seen);
  sc.x.resize(sc.a.size());
  try {
    closedform::solve_equality_qp(sc.a, sc.b, impl_->c[static_cast<std::size_t>(node)], sc.d,
                                  sc.x, sc.ws);
  } catch (const Error& e) {
    throw Error(e.code(), "x-update of node " + std::to_string(node) + ", scenario " +
                              std::to_string(m) + ": " + strip_code(e));
  }
  scatter_x(sc.x, node, impl_->general_cost, state.x_at(node, m));
}

closedform::FlowConsensus Solver::flow_instance(const AdmmState& state, int node,
                                                std::size_t m) const {
  const auto& net = program_.network();
  const double rho = state.rho;
  const int parent = net.ancestor(node);
  const int slot = impl_->child_slot[static_cast<std::size_t>(node)];
  const auto& x = state.x_at(node, m);
  const auto& y = state.y_at(node, m);
  const auto& xp = state.x_at(parent, m);
  const auto& yp = state.y_at(parent, m);
  if (log_) {
    log_->record(Phase::kZ, node, node);
    log_->record(Phase::kZ, node, parent);
  }
  const double p_hat = xp.hat[3 * slot];
  const double q_hat = xp.hat[3 * slot + 1];
  const double l_hat = xp.hat[3 * slot + 2];

  double v_sum = x.v;
  double omega_sum = y.omega;
  const auto kids = net.children(node);
  for (int j : kids) {
    if (log_) log_->record(Phase::kZ, node, j);
    v_sum += state.x_at(j, m).v_hat;
    omega_sum += state.y_at(j, m).omega_hat;
  }
  closedform::FlowConsensus fc;
  fc.c_p = -(x.P + p_hat + (y.lambda + yp.hat[3 * slot]) / rho);
  fc.c_q = -(x.Q + q_hat + (y.mu + yp.hat[3 * slot + 1]) / rho);
  fc.c_v = -(v_sum + omega_sum / rho);
  fc.c_l = -(x.l + l_hat + (y.gamma + yp.hat[3 * slot + 2]) / rho);
  fc.child_count = kids.size();
  fc.v_min = net.v_min();
  fc.v_max = net.v_max();
  fc.l_max = net.line(node).l_max;
  return fc;
}

void Solver::z_update(AdmmState& state, int node) const {
  const auto& net = program_.network();
  const double rho = state.rho;
  const std::size_t M = state.scenarios;
  if (node == 0) {
    if (log_) log_->record(Phase::kZ, 0, 0);
    const auto& obj = program_.objective();
    for (std::size_t m = 0; m < M; ++m) {
      const auto& x = state.x_at(0, m);
      const auto& y = state.y_at(0, m);
      auto& z = state.z_at(0, m);
      if (obj.general_cost) {
        const double sb = net.per_unit().s_base_mva;
        const auto& cost = *obj.general_cost;
        z.p0 = closedform::scalar_prox(
            [&](double p) { return cost.derivative(p * sb); }, x.p0 + y.zeta / rho,
            program_.probability(m) / rho);
      } else {
        z.p0_plus = closedform::positive_part((y.zeta_plus + rho * x.p0_plus) / rho);
        z.p0_minus = closedform::positive_part((y.zeta_minus + rho * x.p0_minus) / rho);
        z.p0 = z.p0_plus - z.p0_minus;
      }
    }
    return;
  }
  for (std::size_t m = 0; m < M; ++m) {
    const closedform::FlowConsensus fc = flow_instance(state, node, m);
    closedform::FlowProjection proj;
    try {
      proj = closedform::project_flow_consensus(fc);
    } catch (const Error& e) {
      throw Error(e.code(), "z-update of node " + std::to_string(node) + ", scenario " +
                                std::to_string(m) + ": " + strip_code(e));
    }
    auto& z = state.z_at(node, m);
    z.P = proj.p;
    z.Q = proj.q;
    z.v = proj.v;
    z.l = proj.l;
    const auto& x = state.x_at(node, m);
    const auto& y = state.y_at(node, m);
    const double cap = config_.force_qw_zero ? 0.0 : program_.qw_max(m, node);
    z.qw = closedform::box_project((y.theta + rho * x.qw) / rho, -cap, cap);
  }
  if (!config_.fixed_pc) {
    const auto& nd = net.node(node);
    thread_local std::vector<double> eta, pc;
    eta.resize(M);
    pc.resize(M);
    for (std::size_t m = 0; m < M; ++m) {
      eta[m] = state.y_at(node, m).eta;
      pc[m] = state.x_at(node, m).pc;
    }
    state.pc_tilde[static_cast<std::size_t>(node)] =
        closedform::update_pc_tilde(nd.utility_weight, nd.pc_max, nd.pc_min, eta, pc, rho);
  }
}

namespace {

// Coupling residuals owned by node i in scenario m, in a fixed order.
template <typename Emit>
void for_each_coupling(const program::StochasticProgram& prog, const AdmmState& st, int i,
                       std::size_t m, bool general_cost, Emit&& emit) {
  const auto& net = prog.network();
  const auto& x = st.x_at(i, m);
  const auto& z = st.z_at(i, m);
  const auto kids = net.children(i);
  if (i == 0) {
    if (general_cost) {
      emit(&YBlock::zeta, -1, x.p0 - z.p0);
    } else {
      emit(&YBlock::zeta_plus, -1, x.p0_plus - z.p0_plus);
      emit(&YBlock::zeta_minus, -1, x.p0_minus - z.p0_minus);
    }
  } else {
    const int parent = net.ancestor(i);
    const double v_parent = parent == 0 ? net.v0() : st.z_at(parent, m).v;
    emit(&YBlock::lambda, -1, x.P - z.P);
    emit(&YBlock::mu, -1, x.Q - z.Q);
    emit(&YBlock::gamma, -1, x.l - z.l);
    emit(&YBlock::omega, -1, x.v - z.v);
    emit(&YBlock::omega_hat, -1, x.v_hat - v_parent);
    emit(&YBlock::eta, -1, x.pc - st.pc_tilde[static_cast<std::size_t>(i)]);
    emit(&YBlock::theta, -1, x.qw - z.qw);
  }
  for (std::size_t k = 0; k < kids.size(); ++k) {
    const auto& zj = st.z_at(kids[k], m);
    emit(nullptr, static_cast<int>(3 * k), x.hat[3 * k] - zj.P);
    emit(nullptr, static_cast<int>(3 * k + 1), x.hat[3 * k + 1] - zj.Q);
    emit(nullptr, static_cast<int>(3 * k + 2), x.hat[3 * k + 2] - zj.l);
  }
}

void log_neighbourhood(AccessLog* log, Phase phase, const network::Network& net, int i) {
  if (!log) return;
  log->record(phase, i, i);
  if (i != 0) log->record(phase, i, net.ancestor(i));
  for (int j : net.children(i)) log->record(phase, i, j);
}

}  // namespace

void Solver::multiplier_update(AdmmState& state) const {
  const auto& net = program_.network();
  impl_->pool.run(state.nodes, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t u = begin; u < end; ++u) {
      const int i = static_cast<int>(u);
      log_neighbourhood(log_, Phase::kMultiplier, net, i);
      for (std::size_t m = 0; m < state.scenarios; ++m) {
        auto& y = state.y_at(i, m);
        for_each_coupling(program_, state, i, m, impl_->general_cost,
                          [&](double YBlock::*field, int hat, double res) {
                            if (field)
                              y.*field += state.rho * res;
                            else
                              y.hat[static_cast<std::size_t>(hat)] += state.rho * res;
                          });
      }
    }
  });
}

Residuals Solver::residuals(const AdmmState& state, const std::vector<ZBlock>& prev_z,
                            const std::vector<double>& prev_pc_tilde) const {
  const auto& net = program_.network();
  const std::size_t M = state.scenarios;
  const bool fixed = config_.fixed_pc.has_value();
  impl_->pool.run(state.nodes, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t u = begin; u < end; ++u) {
      const int i = static_cast<int>(u);
      double r2 = 0.0, s2 = 0.0;
      const double v_mult = 1.0 + static_cast<double>(net.children(i).size());
      for (std::size_t m = 0; m < M; ++m) {
        for_each_coupling(program_, state, i, m, impl_->general_cost,
                          [&](double YBlock::*, int, double res) { r2 += res * res; });
        const auto& z = state.z_at(i, m);
        const auto& zp = prev_z[state.index(i, m)];
        if (i == 0) {
          if (impl_->general_cost) {
            s2 += (z.p0 - zp.p0) * (z.p0 - zp.p0);
          } else {
            s2 += (z.p0_plus - zp.p0_plus) * (z.p0_plus - zp.p0_plus);
            s2 += (z.p0_minus - zp.p0_minus) * (z.p0_minus - zp.p0_minus);
          }
        } else {
          s2 += 2.0 * (z.P - zp.P) * (z.P - zp.P);
          s2 += 2.0 * (z.Q - zp.Q) * (z.Q - zp.Q);
          s2 += 2.0 * (z.l - zp.l) * (z.l - zp.l);
          s2 += v_mult * (z.v - zp.v) * (z.v - zp.v);
          s2 += (z.qw - zp.qw) * (z.qw - zp.qw);
        }
      }
      if (i != 0 && !fixed) {
        const double dpc = state.pc_tilde[u] - prev_pc_tilde[u];
        s2 += static_cast<double>(M) * dpc * dpc;
      }
      impl_->partial[u].r2 = r2;
      impl_->partial[u].s2 = s2;
    }
  });
  double r2 = 0.0, s2 = 0.0;
  for (std::size_t u = 0; u < state.nodes; ++u) {
    r2 += impl_->partial[u].r2;
    s2 += impl_->partial[u].s2;
  }
  return {std::sqrt(r2), state.rho * std::sqrt(s2)};
}

double Solver::socp_gap(const AdmmState& state) const {
  double gap = -std::numeric_limits<double>::infinity();
  for (std::size_t u = 1; u < state.nodes; ++u)
    for (std::size_t m = 0; m < state.scenarios; ++m) {
      const auto& z = state.z_at(static_cast<int>(u), m);
      gap = std::max(gap, z.v * z.l - z.P * z.P - z.Q * z.Q);
    }
  return state.nodes > 1 ? gap : 0.0;
}

double Solver::objective(const AdmmState& state) const {
  return program::objective_value(program_, extract_solution(state));
}

program::Solution Solver::extract_solution(const AdmmState& state) const {
  const auto& net = program_.network();
  const std::size_t n = state.nodes;
  program::Solution sol = program::make_empty_solution(n, state.scenarios);
  sol.pc = state.pc_tilde;
  sol.pc[0] = 0.0;
  for (std::size_t m = 0; m < state.scenarios; ++m) {
    auto& f = sol.scenarios[m];
    for (std::size_t u = 1; u < n; ++u) {
      const auto& z = state.z_at(static_cast<int>(u), m);
      f.P[u] = z.P;
      f.Q[u] = z.Q;
      f.v[u] = z.v;
      f.l[u] = z.l;
      f.qw[u] = z.qw;
    }
    const auto& z0 = state.z_at(0, m);
    if (program_.objective().general_cost) {
      f.p0_plus = std::max(z0.p0, 0.0);
      f.p0_minus = std::max(-z0.p0, 0.0);
      f.P[0] = z0.p0;
    } else {
      f.p0_plus = z0.p0_plus;
      f.p0_minus = z0.p0_minus;
      f.P[0] = z0.p0_plus - z0.p0_minus;
    }
    double q0 = 0.0;
    for (int j : net.children(0)) q0 += f.Q[j] + net.line(j).x * f.l[j];
    f.Q[0] = q0;
    f.v[0] = net.v0();
    f.l[0] = 0.0;
    f.qw[0] = 0.0;
  }
  return sol;
}

void Solver::x_phase(AdmmState& state) const {
  const std::size_t M = state.scenarios;
  impl_->pool.run(state.nodes * M, [&](std::size_t begin, std::size_t end, std::size_t w) {
    Scratch& sc = impl_->scratch[w];
    for (std::size_t k = begin; k < end; ++k) {
      const int i = static_cast<int>(k / M);
      const std::size_t m = k % M;
      auto seen = [&](int owner) {
        if (log_) log_->record(Phase::kX, i, owner);
      };
      fill_x_problem(program_, state, i, m, impl_->general_cost, sc.a, sc.b, sc.d, seen);
      sc.x.resize(sc.a.size());
      try {
        closedform::solve_equality_qp(sc.a, sc.b, impl_->c[static_cast<std::size_t>(i)],
                                      sc.d, sc.x, sc.ws);
      } catch (const Error& e) {
        throw Error(e.code(), "x-update of node " + std::to_string(i) + ", scenario " +
                                  std::to_string(m) + ": " + strip_code(e));
      }
      scatter_x(sc.x, i, impl_->general_cost, state.x_at(i, m));
    }
  });
}

void Solver::z_phase(AdmmState& state) const {
  impl_->pool.run(state.nodes, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t u = begin; u < end; ++u) z_update(state, static_cast<int>(u));
  });
}

Residuals Solver::iterate(AdmmState& state) const {
  const auto prev_z = state.z;
  const auto prev_pc = state.pc_tilde;
  x_phase(state);
  z_phase(state);
  multiplier_update(state);
  ++state.iteration;
  return residuals(state, prev_z, prev_pc);
}

SolveReport Solver::solve() const {
  AdmmState state = init_state();
  return solve(state);
}

SolveReport Solver::solve(AdmmState& state) const {
  SolveReport rep;
  std::vector<ZBlock> prev_z;
  std::vector<double> prev_pc;
  for (int k = 1; k <= config_.max_iters; ++k) {
    prev_z = state.z;
    prev_pc = state.pc_tilde;

    auto t0 = Clock::now();
    x_phase(state);
    rep.times.x_seconds += seconds_since(t0);

    t0 = Clock::now();
    z_phase(state);
    rep.times.z_seconds += seconds_since(t0);

    t0 = Clock::now();
    multiplier_update(state);
    rep.times.multiplier_seconds += seconds_since(t0);
    state.iteration = k;

    t0 = Clock::now();
    const Residuals res = residuals(state, prev_z, prev_pc);
    const double gap = socp_gap(state);
    rep.times.residual_seconds += seconds_since(t0);

    rep.trace.r.push_back(res.r);
    rep.trace.s.push_back(res.s);
    rep.trace.gap.push_back(gap);
    rep.trace.rho.push_back(state.rho);
    rep.trace.objective.push_back(objective(state));
    rep.iterations = k;
    rep.final_r = res.r;
    rep.final_s = res.s;
    rep.final_gap = gap;
    rep.final_rho = state.rho;

    if (res.r <= config_.eps_primal && res.s <= config_.eps_dual &&
        gap <= config_.socp_gap_tol) {
      rep.converged = true;
      break;
    }
    if (config_.rho_policy == RhoPolicy::kAdaptive) state.rho = adapt_rho(state.rho, res.r, res.s);
  }
  rep.solution = extract_solution(state);
  return rep;
}

AdmmState init_state(const program::StochasticProgram& program, const SolverConfig& config) {
  return Solver(program, config).init_state();
}

SolveReport solve(const program::StochasticProgram& program, const SolverConfig& config) {
  return Solver(program, config).solve();
}

}  // namespace dsopf::admm

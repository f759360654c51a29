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

#include "dsopf/closedform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>

#include "dsopf/error.hpp"

namespace dsopf::closedform {
namespace {

constexpr double kRelativePivotFloor = 1e-12;
constexpr double kConditionCeiling = 1e14;

void check_qp_shapes(std::size_t n, std::size_t rows, std::size_t b_size,
                     std::size_t c_size, std::size_t x_size) {
  if (b_size != n || c_size != rows * n || x_size != n)
    throw Error(ErrorCode::kBadParameter, "equality QP dimensions are inconsistent");
  if (rows > n)
    throw Error(ErrorCode::kRankDeficient,
                "more equality rows (" + std::to_string(rows) + ") than variables (" +
                    std::to_string(n) + ")");
}

// In-place Cholesky of a dense SPD matrix (lower triangle), then solve.
void cholesky_solve(std::vector<double>& s, std::vector<double>& rhs, std::size_t k) {
  double max_pivot = 0.0;
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    const double diag = s[j * k + j];
    double v = diag;
    for (std::size_t p = 0; p < j; ++p) v -= s[j * k + p] * s[j * k + p];
    if (!(diag > 0.0) || !(v > kRelativePivotFloor * diag)) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "row %zu of C is linearly dependent on earlier rows (relative pivot %.3e)",
                    j, diag > 0.0 ? v / diag : 0.0);
      throw Error(ErrorCode::kRankDeficient, buf);
    }
    const double l = std::sqrt(v);
    s[j * k + j] = l;
    max_pivot = std::max(max_pivot, v);
    min_pivot = std::min(min_pivot, v);
    for (std::size_t i = j + 1; i < k; ++i) {
      double w = s[i * k + j];
      for (std::size_t p = 0; p < j; ++p) w -= s[i * k + p] * s[j * k + p];
      s[i * k + j] = w / l;
    }
  }
  if (k > 0 && max_pivot / min_pivot > kConditionCeiling) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "Schur complement pivot ratio %.3e exceeds %.1e",
                  max_pivot / min_pivot, kConditionCeiling);
    throw Error(ErrorCode::kSingularSchur, buf);
  }
  for (std::size_t i = 0; i < k; ++i) {
    double v = rhs[i];
    for (std::size_t p = 0; p < i; ++p) v -= s[i * k + p] * rhs[p];
    rhs[i] = v / s[i * k + i];
  }
  for (std::size_t ii = k; ii-- > 0;) {
    double v = rhs[ii];
    for (std::size_t p = ii + 1; p < k; ++p) v -= s[p * k + ii] * rhs[p];
    rhs[ii] = v / s[ii * k + ii];
  }
}

double clip(double t, double lo, double hi) { return std::max(lo, std::min(t, hi)); }

// Reduced problem after rotating (c1, c2) onto the first axis:
//   minimize (r - a)^2 + (z3 - b)^2 + (z4 - e)^2
//   s.t. lo <= z3 <= hi, r^2 <= k2 z3 z4, z4 <= m.
struct Reduced {
  double a, b, e, k2, lo, hi, m;
};

struct Candidate {
  double r, z3, z4, mu, gamma, lmin, lmax;
  ConeBoxBranch branch;
};

double reduced_objective(const Reduced& p, double r, double z3, double z4) {
  return (r - p.a) * (r - p.a) + (z3 - p.b) * (z3 - p.b) + (z4 - p.e) * (z4 - p.e);
}

// Positive root y > max(mu + b, 0) of y^3 - (mu + b) y^2 - mu a^2 / 2 = 0.
double inner_root(double mu, double a, double b) {
  const double s = mu + b;
  const double q = 0.5 * mu * a * a;
  if (q <= 0.0) return std::max(s, 0.0);
  double y = std::max(s, 0.0) + std::cbrt(q);
  for (int it = 0; it < 100; ++it) {
    const double f = y * y * (y - s) - q;
    const double df = y * (3.0 * y - 2.0 * s);
    if (!(df > 0.0)) break;
    const double step = f / df;
    y -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * y) break;
  }
  return y;
}

struct InnerPoint {
  double r, z3, z4;
};

// Minimizer over (r, z3, z4) of the Lagrangian for fixed mu with the cap inactive.
InnerPoint inner_point(const Reduced& p, double mu) {
  InnerPoint pt{};
  if (mu <= 0.0) {
    pt.z3 = clip(p.b, p.lo, p.hi);
    pt.r = p.a;
  } else {
    pt.z3 = clip(inner_root(mu, p.a, p.b) - mu, p.lo, p.hi);
    pt.r = p.a * pt.z3 / (pt.z3 + mu);
  }
  pt.z4 = p.e + 0.5 * p.k2 * mu;
  return pt;
}

double cone_slack(const Reduced& p, const InnerPoint& pt) {
  return pt.r * pt.r / pt.z3 - p.k2 * pt.z4;
}

struct PhiValue {
  double phi, slope;
};

// phi(mu) = cone slack at the inner minimizer and its derivative.
PhiValue phi_with_slope(const Reduced& p, double mu) {
  const double half_k4 = 0.5 * p.k2 * p.k2;
  const double z4 = p.e + 0.5 * p.k2 * mu;
  if (mu <= 0.0) {
    const double z3 = clip(p.b, p.lo, p.hi);
    return {p.a * p.a / z3 - p.k2 * z4, -half_k4};
  }
  const double y = inner_root(mu, p.a, p.b);
  const double z3_free = y - mu;
  if (z3_free > p.lo && z3_free < p.hi) {
    const double dy = (y * y + 0.5 * p.a * p.a) / (y * (3.0 * y - 2.0 * (mu + p.b)));
    const double dz3 = dy - 1.0;
    const double phi = p.a * p.a * z3_free / (y * y) - p.k2 * z4;
    const double slope = p.a * p.a * (dz3 * y - 2.0 * z3_free * dy) / (y * y * y) - half_k4;
    return {phi, slope};
  }
  const double z3 = clip(z3_free, p.lo, p.hi);
  const double w = z3 + mu;
  return {p.a * p.a * z3 / (w * w) - p.k2 * z4, -2.0 * p.a * p.a * z3 / (w * w * w) - half_k4};
}

// Root of the nonincreasing phi on (0, inf); phi(0) > 0 on entry.
// Newton steps safeguarded by a shrinking bracket.
double solve_cone_multiplier(const Reduced& p) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double mu = 0.0;
  for (int it = 0; it < 200; ++it) {
    const PhiValue f = phi_with_slope(p, mu);
    if (f.phi == 0.0) return mu;
    if (f.phi > 0.0)
      lo = mu;
    else
      hi = mu;
    double next = f.slope < 0.0 ? mu - f.phi / f.slope : -1.0;
    if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * lo + 1.0;
    if (std::abs(next - mu) <= 4.0 * eps * std::max(1.0, next)) return next;
    if (std::isfinite(hi) && hi - lo <= 4.0 * eps * std::max(1.0, hi)) return 0.5 * (lo + hi);
    mu = next;
  }
  return mu;
}

// Unique positive root of 2t^3 + (kappa - 2b) t - sqrt(kappa) a = 0 (a > 0).
double cap_interior_root(double a, double b, double kappa) {
  const double p = 0.5 * (kappa - 2.0 * b);
  const double q = -0.5 * std::sqrt(kappa) * a;
  auto f = [&](double t) { return t * t * t + p * t + q; };
  double t;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc >= 0.0) {
    const double sd = std::sqrt(disc);
    t = std::cbrt(-0.5 * q + sd) + std::cbrt(-0.5 * q - sd);
  } else {
    // Three real roots; the positive one is the largest.
    const double rad = 2.0 * std::sqrt(-p / 3.0);
    const double ang = std::acos(std::clamp(3.0 * q / (p * rad), -1.0, 1.0)) / 3.0;
    t = rad * std::cos(ang);
  }
  t = std::max(t, 0.0);
  for (int it = 0; it < 8; ++it) {
    const double df = 3.0 * t * t + p;
    if (!(df > 0.0)) break;
    const double step = f(t) / df;
    t -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(t)) break;
  }
  return std::max(t, 0.0);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Candidate build_capped(const Reduced& p, double z3, double mu, ConeBoxBranch branch) {
  Candidate c{};
  c.z3 = z3;
  c.z4 = p.m;
  c.mu = mu;
  c.r = p.a * z3 / (z3 + mu);
  c.gamma = 2.0 * p.e + p.k2 * mu - 2.0 * p.m;
  const double g3 = 2.0 * (z3 - p.b) - mu * c.r * c.r / (z3 * z3);
  if (branch == ConeBoxBranch::kConeCapAtMin) c.lmin = g3;
  if (branch == ConeBoxBranch::kConeCapAtMax) c.lmax = -g3;
  c.branch = branch;
  return c;
}

}  // namespace

std::vector<double> solve_equality_qp(const EqQpInstance& qp) {
  std::vector<double> x(qp.cols());
  EqQpWorkspace ws;
  solve_equality_qp(qp.a_diag, qp.b, qp.c, qp.d, x, ws);
  return x;
}

void solve_equality_qp(std::span<const double> a_diag, std::span<const double> b,
                       std::span<const double> c, std::span<const double> d,
                       std::span<double> x, EqQpWorkspace& ws) {
  const std::size_t n = a_diag.size();
  const std::size_t k = d.size();
  check_qp_shapes(n, k, b.size(), c.size(), x.size());
  for (std::size_t j = 0; j < n; ++j)
    if (!(a_diag[j] > 0.0))
      throw Error(ErrorCode::kBadParameter,
                  "A_diag[" + std::to_string(j) + "] must be positive");

  ws.scaled_b.resize(n);
  for (std::size_t j = 0; j < n; ++j) ws.scaled_b[j] = b[j] / a_diag[j];

  ws.schur.assign(k * k, 0.0);
  ws.rhs.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double* ci = c.data() + i * n;
    double acc = d[i];
    for (std::size_t j = 0; j < n; ++j) acc += ci[j] * ws.scaled_b[j];
    ws.rhs[i] = acc;
    for (std::size_t r = 0; r <= i; ++r) {
      const double* cr = c.data() + r * n;
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += ci[j] * cr[j] / a_diag[j];
      ws.schur[i * k + r] = s;
      ws.schur[r * k + i] = s;
    }
  }
  cholesky_solve(ws.schur, ws.rhs, k);

  for (std::size_t j = 0; j < n; ++j) {
    double acc = -b[j];
    for (std::size_t i = 0; i < k; ++i) acc += c[i * n + j] * ws.rhs[i];
    x[j] = acc / a_diag[j];
  }
}

std::string_view to_string(ConeBoxBranch branch) {
  switch (branch) {
    case ConeBoxBranch::kInactive: return "inactive";
    case ConeBoxBranch::kCapOnly: return "cap_only";
    case ConeBoxBranch::kConeInterior: return "cone_interior";
    case ConeBoxBranch::kConeAtMin: return "cone_at_min";
    case ConeBoxBranch::kConeAtMax: return "cone_at_max";
    case ConeBoxBranch::kConeCapInterior: return "cone_cap_interior";
    case ConeBoxBranch::kConeCapAtMin: return "cone_cap_at_min";
    case ConeBoxBranch::kConeCapAtMax: return "cone_cap_at_max";
  }
  return "unknown";
}

std::string dump_json(const ConeBoxInstance& inst) {
  return "{\"c1\":" + fmt(inst.c1) + ",\"c2\":" + fmt(inst.c2) + ",\"c3\":" + fmt(inst.c3) +
         ",\"c4\":" + fmt(inst.c4) + ",\"k2\":" + fmt(inst.k2) +
         ",\"z3_min\":" + fmt(inst.z3_min) + ",\"z3_max\":" + fmt(inst.z3_max) +
         ",\"z4_max\":" + fmt(inst.z4_max) + "}";
}

double cone_box_objective(const ConeBoxInstance& inst, double z1, double z2, double z3,
                          double z4) {
  return z1 * z1 + inst.c1 * z1 + z2 * z2 + inst.c2 * z2 + z3 * z3 + inst.c3 * z3 +
         z4 * z4 + inst.c4 * z4;
}

double cone_box_kkt_residual(const ConeBoxInstance& inst, const ConeBoxResult& r) {
  const double rr = r.z1 * r.z1 + r.z2 * r.z2;
  const double g_cone = rr / r.z3 - inst.k2 * r.z4;
  const std::array<double, 16> terms = {
      2.0 * r.z1 + inst.c1 + 2.0 * r.mu * r.z1 / r.z3,
      2.0 * r.z2 + inst.c2 + 2.0 * r.mu * r.z2 / r.z3,
      2.0 * r.z3 + inst.c3 - r.mu * rr / (r.z3 * r.z3) + r.lambda_max - r.lambda_min,
      2.0 * r.z4 + inst.c4 - r.mu * inst.k2 + r.gamma,
      r.mu * g_cone,
      r.gamma * (r.z4 - inst.z4_max),
      r.lambda_min * (inst.z3_min - r.z3),
      r.lambda_max * (r.z3 - inst.z3_max),
      std::max(0.0, -r.mu),
      std::max(0.0, -r.gamma),
      std::max(0.0, -r.lambda_min),
      std::max(0.0, -r.lambda_max),
      std::max(0.0, g_cone),
      std::max(0.0, r.z4 - inst.z4_max),
      std::max(0.0, inst.z3_min - r.z3),
      std::max(0.0, r.z3 - inst.z3_max),
  };
  double worst = 0.0;
  for (double t : terms) worst = std::max(worst, std::abs(t));
  return worst;
}

ConeBoxResult project_cone_box(const ConeBoxInstance& inst) {
  const bool finite = std::isfinite(inst.c1) && std::isfinite(inst.c2) &&
                      std::isfinite(inst.c3) && std::isfinite(inst.c4) &&
                      std::isfinite(inst.z3_max) && std::isfinite(inst.z4_max);
  if (!finite || !(inst.k2 > 0.0) || !(inst.z3_min > 0.0) ||
      !(inst.z3_min <= inst.z3_max) || !(inst.z4_max > 0.0))
    throw Error(ErrorCode::kBadParameter, "invalid cone-box instance " + dump_json(inst));

  const double norm12 = std::hypot(inst.c1, inst.c2);
  const Reduced p{0.5 * norm12,  -0.5 * inst.c3,  -0.5 * inst.c4, inst.k2,
                  inst.z3_min,   inst.z3_max,     inst.z4_max};
  const double u1 = norm12 > 0.0 ? -inst.c1 / norm12 : 1.0;
  const double u2 = norm12 > 0.0 ? -inst.c2 / norm12 : 0.0;
  const double scale = 1.0 + p.a + std::abs(p.b) + std::abs(p.e) + p.m + p.hi;
  const double tol = 1e-11 * scale;

  std::optional<Candidate> best;
  auto consider = [&](const Candidate& c) {
    if (!best || reduced_objective(p, c.r, c.z3, c.z4) < reduced_objective(p, best->r, best->z3, best->z4))
      best = c;
  };

  // Cone inactive.
  const double z3_free = clip(p.b, p.lo, p.hi);
  const double z4_free = std::min(p.e, p.m);
  if (p.a * p.a <= p.k2 * z3_free * z4_free) {
    Candidate c{};
    c.r = p.a;
    c.z3 = z3_free;
    c.z4 = z4_free;
    if (p.b < p.lo) c.lmin = 2.0 * (p.lo - p.b);
    if (p.b > p.hi) c.lmax = 2.0 * (p.b - p.hi);
    if (p.e > p.m) {
      c.gamma = 2.0 * (p.e - p.m);
      c.branch = ConeBoxBranch::kCapOnly;
    } else {
      c.branch = ConeBoxBranch::kInactive;
    }
    best = c;
  } else {
    // Cone active, cap inactive.
    std::optional<Candidate> near_cap;
    if (cone_slack(p, inner_point(p, 0.0)) > 0.0) {
      const double mu = solve_cone_multiplier(p);
      const InnerPoint pt = inner_point(p, mu);
      Candidate c{};
      c.r = pt.r;
      c.z3 = pt.z3;
      c.z4 = pt.z4;
      c.mu = mu;
      const double g3 = 2.0 * (pt.z3 - p.b) - mu * pt.r * pt.r / (pt.z3 * pt.z3);
      if (pt.z3 <= p.lo && (g3 >= 0.0 || pt.z3 < p.hi)) {
        c.lmin = std::max(0.0, g3);
        c.branch = ConeBoxBranch::kConeAtMin;
      } else if (pt.z3 >= p.hi) {
        c.lmax = std::max(0.0, -g3);
        c.branch = ConeBoxBranch::kConeAtMax;
      } else {
        c.branch = ConeBoxBranch::kConeInterior;
      }
      if (pt.z4 <= p.m)
        best = c;
      else if (pt.z4 <= p.m + tol)
        near_cap = c;
    }

    if (!best) {
      // Cone and cap both active.
      const double kappa = p.k2 * p.m;
      auto valid = [&](const Candidate& c) {
        return c.mu > -tol && c.gamma >= -tol && c.lmin >= -tol && c.lmax >= -tol;
      };
      for (const auto& [z3b, branch] :
           {std::pair{p.lo, ConeBoxBranch::kConeCapAtMin},
            std::pair{p.hi, ConeBoxBranch::kConeCapAtMax}}) {
        const double mu = p.a * std::sqrt(z3b) / std::sqrt(kappa) - z3b;
        Candidate c = build_capped(p, z3b, std::max(mu, 0.0), branch);
        if (mu > -tol && valid(c)) consider(c);
      }
      if (p.a > 0.0) {
        const double t = cap_interior_root(p.a, p.b, kappa);
        const double z3 = t * t;
        if (z3 > p.lo && z3 < p.hi) {
          const double mu = 2.0 * z3 * (z3 - p.b) / kappa;
          Candidate c = build_capped(p, z3, std::max(mu, 0.0),
                                     ConeBoxBranch::kConeCapInterior);
          if (mu > -tol && valid(c)) consider(c);
        }
      }
      if (!best && near_cap) {
        near_cap->z4 = p.m;
        best = near_cap;
      }
    }
  }

  if (!best)
    throw Error(ErrorCode::kNoKktCase, "no KKT branch satisfied for " + dump_json(inst));

  ConeBoxResult out;
  out.z1 = best->r * u1;
  out.z2 = best->r * u2;
  out.z3 = best->z3;
  out.z4 = best->z4;
  out.mu = std::max(best->mu, 0.0);
  out.gamma = std::max(best->gamma, 0.0);
  out.lambda_min = std::max(best->lmin, 0.0);
  out.lambda_max = std::max(best->lmax, 0.0);
  out.branch = best->branch;
  return out;
}

ConeBoxInstance to_cone_box(const FlowConsensus& in) {
  const double s = std::sqrt(0.5 * (1.0 + static_cast<double>(in.child_count)));
  ConeBoxInstance inst;
  inst.c1 = in.c_p;
  inst.c2 = in.c_q;
  inst.c3 = in.c_v / s;
  inst.c4 = in.c_l;
  inst.k2 = 1.0 / s;
  inst.z3_min = s * in.v_min;
  inst.z3_max = s * in.v_max;
  inst.z4_max = in.l_max;
  return inst;
}

FlowProjection project_flow_consensus(const FlowConsensus& in) {
  const double s = std::sqrt(0.5 * (1.0 + static_cast<double>(in.child_count)));
  const ConeBoxResult r = project_cone_box(to_cone_box(in));
  return {r.z1, r.z2, r.z3 / s, r.z4, r.branch};
}

double box_project(double value, double lo, double hi) {
  if (!(lo <= hi)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "lower bound %.17g exceeds upper bound %.17g", lo, hi);
    throw Error(ErrorCode::kBadBounds, buf);
  }
  return std::max(lo, std::min(value, hi));
}

double positive_part(double value) { return std::max(0.0, value); }

double update_pc_tilde(double utility_weight, double pc_max, double pc_min,
                       std::span<const double> eta, std::span<const double> pc_copies,
                       double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCode::kBadParameter, "rho must be positive");
  if (eta.size() != pc_copies.size())
    throw Error(ErrorCode::kBadParameter, "eta and pc copies differ in length");
  double num = 2.0 * utility_weight * pc_max;
  for (std::size_t m = 0; m < eta.size(); ++m) num += eta[m] + rho * pc_copies[m];
  const double den = 2.0 * utility_weight + rho * static_cast<double>(eta.size());
  return box_project(num / den, pc_min, pc_max);
}

double scalar_prox(const std::function<double(double)>& derivative, double center,
                   double weight) {
  if (!(weight >= 0.0)) throw Error(ErrorCode::kBadParameter, "prox weight must be >= 0");
  auto h = [&](double p) { return p + weight * derivative(p) - center; };
  double step = std::max(1.0, std::abs(center));
  double lo = center - step;
  double hi = center + step;
  for (int it = 0; h(lo) > 0.0 && it < 200; ++it) lo -= (step *= 2.0);
  step = std::max(1.0, std::abs(center));
  for (int it = 0; h(hi) < 0.0 && it < 200; ++it) hi += (step *= 2.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dsopf::closedform

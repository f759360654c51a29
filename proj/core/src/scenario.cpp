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

#include "dsopf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dsopf/error.hpp"

namespace dsopf::scenario {
namespace {

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

double draw_beta(std::mt19937_64& rng, const BetaParams& p) {
  std::gamma_distribution<double> ga(p.alpha, 1.0);
  std::gamma_distribution<double> gb(p.beta, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  if (x + y <= 0.0) return p.alpha >= p.beta ? 1.0 : 0.0;  // both underflowed
  return x / (x + y);
}

}  // namespace

double ScenarioSet::total_probability() const {
  CompensatedSum s;
  for (const auto& sc : scenarios) s.add(sc.probability);
  return s.value();
}

double ScenarioSet::min_probability() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& sc : scenarios) m = std::min(m, sc.probability);
  return scenarios.empty() ? 0.0 : m;
}

void validate(const ScenarioSet& set) {
  if (set.scenarios.empty()) throw Error(ErrorCode::kBadParameter, "empty scenario set");
  const std::size_t nodes = set.node_count();
  for (std::size_t m = 0; m < set.size(); ++m) {
    const auto& sc = set.scenarios[m];
    if (sc.w_mw.size() != nodes)
      throw Error(ErrorCode::kBadParameter,
                  "scenario " + std::to_string(m) + " has a different node domain");
    if (!(sc.probability >= 0.0))
      throw Error(ErrorCode::kBadParameter, "scenario " + std::to_string(m) + " has pi < 0");
    for (double w : sc.w_mw)
      if (!(w >= 0.0) || !std::isfinite(w))
        throw Error(ErrorCode::kBadParameter,
                    "scenario " + std::to_string(m) + " has a negative or non-finite injection");
  }
  if (std::abs(set.total_probability() - 1.0) > 1e-9)
    throw Error(ErrorCode::kBadParameter, "scenario probabilities do not sum to 1");
}

BetaParams beta_params_from_mean(double mean_ratio) {
  if (!(mean_ratio > 0.0 && mean_ratio < 1.0))
    throw Error(ErrorCode::kOutOfRange, "mean ratio must lie in (0, 1)");
  const double m = mean_ratio;
  const double sigma = 0.2 * m + 0.21;
  double var = sigma * sigma;
  const double cap = m * (1.0 - m);
  BetaParams out;
  if (var >= cap) {
    var = 0.99 * cap;
    out.variance_clamped = true;
  }
  const double total = cap / var - 1.0;
  out.alpha = m * total;
  out.beta = (1.0 - m) * total;
  return out;
}

double max_injection_mw(const network::Network& net, int node) {
  return net.node_params(node).pv_capacity_mva / 1.1;
}

ScenarioSet sample_scenarios(const network::Network& net,
                             std::span<const double> mean_ratio,
                             const SamplingOptions& options) {
  const std::size_t n = net.node_count();
  if (mean_ratio.size() != 1 && mean_ratio.size() != n)
    throw Error(ErrorCode::kBadParameter, "mean ratio must be global or per node");
  if (options.count == 0) throw Error(ErrorCode::kBadParameter, "scenario count must be > 0");

  std::vector<BetaParams> params(n);
  std::vector<double> w_max(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    w_max[i] = max_injection_mw(net, static_cast<int>(i));
    if (w_max[i] > 0.0)
      params[i] = beta_params_from_mean(mean_ratio.size() == 1 ? mean_ratio[0] : mean_ratio[i]);
  }

  ScenarioSet set;
  set.seed = options.seed;
  set.scenarios.resize(options.count);
  std::mt19937_64 rng(options.seed);
  const double pi = 1.0 / static_cast<double>(options.count);
  for (auto& sc : set.scenarios) {
    sc.probability = pi;
    sc.w_mw.assign(n, 0.0);
    if (options.correlation == Correlation::kCommonFactor) {
      // A single draw from the first PV node's law drives every node.
      double shared = 0.0;
      for (std::size_t i = 1; i < n; ++i)
        if (w_max[i] > 0.0) {
          shared = draw_beta(rng, params[i]);
          break;
        }
      for (std::size_t i = 1; i < n; ++i) sc.w_mw[i] = shared * w_max[i];
    } else {
      for (std::size_t i = 1; i < n; ++i)
        if (w_max[i] > 0.0) sc.w_mw[i] = draw_beta(rng, params[i]) * w_max[i];
    }
  }
  return set;
}

ScenarioSet sample_scenarios(const network::Network& net, double mean_ratio,
                             const SamplingOptions& options) {
  const double r[1] = {mean_ratio};
  return sample_scenarios(net, std::span<const double>(r, 1), options);
}

double scenario_distance(const Scenario& a, const Scenario& b, Metric metric) {
  double acc = 0.0;
  const std::size_t n = std::min(a.w_mw.size(), b.w_mw.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.w_mw[i] - b.w_mw[i];
    acc += metric == Metric::kL1 ? std::abs(d) : d * d;
  }
  return metric == Metric::kL1 ? acc : std::sqrt(acc);
}

double kantorovich_distance(const ScenarioSet& full, std::span<const std::size_t> kept,
                            Metric metric) {
  if (kept.empty()) throw Error(ErrorCode::kEmptyKeptSet, "kept set is empty");
  std::vector<bool> is_kept(full.size(), false);
  for (std::size_t k : kept) {
    if (k >= full.size())
      throw Error(ErrorCode::kBadParameter, "kept index " + std::to_string(k) + " out of range");
    is_kept[k] = true;
  }
  CompensatedSum total;
  for (std::size_t w = 0; w < full.size(); ++w) {
    if (is_kept[w]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k : kept)
      best = std::min(best, scenario_distance(full.scenarios[w], full.scenarios[k], metric));
    total.add(full.scenarios[w].probability * best);
  }
  return total.value();
}

Reduction fast_forward_reduce(const ScenarioSet& full, std::size_t target, Metric metric) {
  const std::size_t n = full.size();
  if (target < 1 || target > n)
    throw Error(ErrorCode::kBadCardinality,
                "cannot reduce " + std::to_string(n) + " scenarios to " + std::to_string(target));

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      dist[a * n + b] = dist[b * n + a] =
          scenario_distance(full.scenarios[a], full.scenarios[b], metric);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> nearest(n, kInf);  // distance to the closest selected scenario
  std::vector<bool> selected(n, false);
  Reduction out;

  for (std::size_t round = 0; round < target; ++round) {
    std::size_t best_u = n;
    double best_d = kInf;
    for (std::size_t u = 0; u < n; ++u) {
      if (selected[u]) continue;
      CompensatedSum d;
      const double* du = &dist[u * n];
      for (std::size_t w = 0; w < n; ++w) {
        if (selected[w] || w == u) continue;
        d.add(full.scenarios[w].probability * std::min(nearest[w], du[w]));
      }
      if (d.value() < best_d) {  // strict: ties keep the lower index
        best_d = d.value();
        best_u = u;
      }
    }
    selected[best_u] = true;
    out.selection_order.push_back(best_u);
    out.distance_trace.push_back(best_d);
    for (std::size_t w = 0; w < n; ++w) nearest[w] = std::min(nearest[w], dist[best_u * n + w]);
  }

  std::vector<std::size_t> kept = out.selection_order;
  std::sort(kept.begin(), kept.end());
  std::vector<CompensatedSum> mass(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) mass[k].add(full.scenarios[kept[k]].probability);
  for (std::size_t w = 0; w < n; ++w) {
    if (selected[w]) continue;
    std::size_t home = 0;
    double best = kInf;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const double d = dist[w * n + kept[k]];
      if (d < best) {
        best = d;
        home = k;
      }
    }
    mass[home].add(full.scenarios[w].probability);
  }

  out.reduced.seed = full.seed;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    Scenario sc = full.scenarios[kept[k]];
    sc.probability = mass[k].value();
    out.reduced.scenarios.push_back(std::move(sc));
    out.reduced.source_index.push_back(full.source_index.empty() ? kept[k]
                                                                 : full.source_index[kept[k]]);
  }
  out.min_probability = out.reduced.min_probability();
  return out;
}

}  // namespace dsopf::scenario

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

#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "dsopf/admm.hpp"
#include "dsopf/closedform.hpp"
#include "dsopf/feeder.hpp"
#include "dsopf/scenario.hpp"

namespace {

using namespace dsopf;

std::vector<closedform::ConeBoxInstance> cone_instances(std::size_t n) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0), p(0.2, 2.0);
  std::vector<closedform::ConeBoxInstance> out(n);
  for (auto& c : out) {
    c.c1 = 4 * u(g);
    c.c2 = 4 * u(g);
    c.c3 = 4 * u(g);
    c.c4 = 4 * u(g);
    c.k2 = p(g);
    c.z3_min = 0.7 * p(g);
    c.z3_max = c.z3_min + p(g);
    c.z4_max = 0.8 * p(g);
  }
  return out;
}

void BM_ConeBoxProjection(benchmark::State& state) {
  const auto inst = cone_instances(1024);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(closedform::project_cone_box(inst[k++ & 1023]));
  }
}

// x-step of an internal node with `children` children: 7 + 3|C| unknowns, 3 rows.
void BM_EqualityQp(benchmark::State& state) {
  const std::size_t n = 7 + 3 * static_cast<std::size_t>(state.range(0));
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  closedform::EqQpInstance qp;
  qp.a_diag.assign(n, 2.0);
  for (std::size_t i = 0; i < n; ++i) qp.b.push_back(u(g));
  for (std::size_t i = 0; i < 3 * n; ++i) qp.c.push_back(u(g));
  qp.d = {u(g), u(g), u(g)};
  closedform::EqQpWorkspace ws;
  std::vector<double> x(n);
  for (auto _ : state) {
    closedform::solve_equality_qp(qp.a_diag, qp.b, qp.c, qp.d, x, ws);
    benchmark::DoNotOptimize(x.data());
  }
}

void BM_AdmmIteration(benchmark::State& state) {
  const auto net = network::make_feeder(network::day_type_feeder());
  scenario::SamplingOptions so;
  so.count = 200;
  so.seed = 3;
  const auto red = scenario::fast_forward_reduce(scenario::sample_scenarios(net, 0.6, so),
                                                 static_cast<std::size_t>(state.range(0)));
  const auto prog = program::StochasticProgram::assemble(net, red.reduced, {});
  admm::SolverConfig cfg;
  cfg.workers = static_cast<std::size_t>(state.range(1));
  const admm::Solver solver(prog, cfg);
  auto st = solver.init_state();
  for (auto _ : state) benchmark::DoNotOptimize(solver.iterate(st));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(net.node_count()) *
                          state.range(0));
}

}  // namespace

BENCHMARK(BM_ConeBoxProjection);
BENCHMARK(BM_EqualityQp)->Arg(0)->Arg(1)->Arg(3);
BENCHMARK(BM_AdmmIteration)->Args({1, 1})->Args({7, 1})->Args({7, 2});

BENCHMARK_MAIN();

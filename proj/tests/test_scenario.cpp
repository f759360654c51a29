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

#include <algorithm>
#include <cmath>
#include <random>

#include "dsopf/error.hpp"
#include "dsopf/feeder.hpp"
#include "dsopf/scenario.hpp"
#include "oracles/reduction.hpp"
#include "support.hpp"

namespace dsopf {
namespace {

using scenario::beta_params_from_mean;
using scenario::fast_forward_reduce;
using scenario::kantorovich_distance;

TEST(Beta, CloudyParameters) {
  const auto p = beta_params_from_mean(0.3);
  EXPECT_FALSE(p.variance_clamped);
  EXPECT_NEAR(p.alpha + p.beta, 0.21 / 0.0729 - 1.0, 1e-12);
  EXPECT_NEAR(p.alpha, 0.5642, 1e-4);
  EXPECT_NEAR(p.beta, 1.3165, 1e-4);
  // mean and variance reproduced exactly
  const double s = p.alpha + p.beta;
  EXPECT_NEAR(p.alpha / s, 0.3, 1e-12);
  EXPECT_NEAR(p.alpha * p.beta / (s * s * (s + 1.0)), 0.27 * 0.27, 1e-12);
}

TEST(Beta, CloudyMonteCarlo) {
  // independent sampler: ratio of gamma draws
  const auto p = beta_params_from_mean(0.3);
  std::mt19937_64 rng(12345);
  std::gamma_distribution<double> ga(p.alpha, 1.0), gb(p.beta, 1.0);
  const int n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = ga(rng), b = gb(rng);
    const double x = a / (a + b);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.3, 0.01 * 0.3);
  EXPECT_NEAR(var, 0.0729, 0.01 * 0.0729);
}

TEST(Beta, SymmetricAtHalf) {
  const auto p = beta_params_from_mean(0.5);
  EXPECT_NEAR(p.alpha, p.beta, 1e-12);
}

TEST(Beta, ClampEngagesForSunnyDays) {
  const double m = 0.9;
  EXPECT_GT((0.2 * m + 0.21) * (0.2 * m + 0.21), m * (1.0 - m));
  const auto p = beta_params_from_mean(m);
  EXPECT_TRUE(p.variance_clamped);
  EXPECT_GT(p.alpha, 0.0);
  EXPECT_GT(p.beta, 0.0);
  const double s = p.alpha + p.beta;
  EXPECT_NEAR(p.alpha / s, m, 1e-12);
  EXPECT_NEAR(p.alpha * p.beta / (s * s * (s + 1.0)), 0.99 * m * (1.0 - m), 1e-12);
}

TEST(Beta, RejectsOutOfRange) {
  for (double m : {0.0, 1.0, -0.2, 1.5}) {
    try {
      beta_params_from_mean(m);
      FAIL() << m;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
    }
  }
}

TEST(Sampling, NoPvMeansNoInjection) {
  testing::ChainOptions o;
  o.pv_mva = 0.0;
  const auto net = testing::tree(3, {}, o);
  const auto set = scenario::sample_scenarios(net, 0.5, {20, 1});
  for (const auto& s : set.scenarios)
    for (double w : s.w_mw) EXPECT_EQ(w, 0.0);
}

TEST(Sampling, MeanMatchesRatio) {
  const auto net = network::make_feeder(network::day_type_feeder());
  const auto set = scenario::sample_scenarios(net, 0.3, {1000, 99});
  EXPECT_EQ(set.size(), 1000u);
  const double sigma = 0.27;
  for (int i : {1, 17, 30, 45}) {
    const double wmax = scenario::max_injection_mw(net, i);
    double mean = 0.0;
    for (const auto& s : set.scenarios) {
      EXPECT_GE(s.w_mw[i], 0.0);
      EXPECT_LE(s.w_mw[i], wmax);
      EXPECT_DOUBLE_EQ(s.probability, 1e-3);
      mean += s.w_mw[i] / wmax;
    }
    mean /= 1000.0;
    EXPECT_NEAR(mean, 0.3, 3.0 * sigma / std::sqrt(1000.0)) << "node " << i;
  }
}

TEST(Sampling, DeterministicPerSeed) {
  const auto net = network::make_feeder(network::day_type_feeder());
  const auto a = scenario::sample_scenarios(net, 0.6, {50, 7});
  const auto b = scenario::sample_scenarios(net, 0.6, {50, 7});
  const auto c = scenario::sample_scenarios(net, 0.6, {50, 8});
  for (std::size_t m = 0; m < a.size(); ++m) EXPECT_EQ(a.scenarios[m].w_mw, b.scenarios[m].w_mw);
  EXPECT_NE(a.scenarios[0].w_mw, c.scenarios[0].w_mw);
}

TEST(Sampling, CommonFactorSharesTheDraw) {
  const auto net = testing::tree(4);
  scenario::SamplingOptions o{30, 3, scenario::Correlation::kCommonFactor};
  const auto set = scenario::sample_scenarios(net, 0.5, o);
  for (const auto& s : set.scenarios)
    for (int i = 2; i <= 4; ++i) EXPECT_DOUBLE_EQ(s.w_mw[i], s.w_mw[1]);
}

TEST(Kantorovich, HandEnumeration) {
  const auto set = testing::scalar_set({0.0, 1.0, 10.0});
  std::vector<std::size_t> all{0, 1, 2}, one{1}, ten{2};
  EXPECT_EQ(kantorovich_distance(set, all), 0.0);
  EXPECT_NEAR(kantorovich_distance(set, one), 10.0 / 3.0, 1e-15);
  EXPECT_NEAR(kantorovich_distance(set, ten), 19.0 / 3.0, 1e-15);
  try {
    kantorovich_distance(set, std::vector<std::size_t>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyKeptSet);
  }
}

TEST(Reduction, SingletonMatchesBruteForce) {
  const auto set = testing::scalar_set({0.0, 1.0, 10.0});
  const auto red = fast_forward_reduce(set, 1);
  ASSERT_EQ(red.reduced.size(), 1u);
  EXPECT_EQ(red.reduced.scenarios[0].w_mw[0], 1.0);
  EXPECT_DOUBLE_EQ(red.reduced.scenarios[0].probability, 1.0);
  EXPECT_NEAR(red.distance_trace.back(), 10.0 / 3.0, 1e-15);
}

TEST(Reduction, IdentityAtFullSize) {
  const auto set = testing::scalar_set({3.0, 1.0, 2.0, 5.0});
  const auto red = fast_forward_reduce(set, 4);
  ASSERT_EQ(red.reduced.size(), 4u);
  for (std::size_t m = 0; m < 4; ++m) {
    EXPECT_EQ(red.reduced.scenarios[m].w_mw, set.scenarios[m].w_mw);
    EXPECT_DOUBLE_EQ(red.reduced.scenarios[m].probability, 0.25);
  }
}

TEST(Reduction, BadCardinality) {
  const auto set = testing::scalar_set({3.0, 1.0});
  for (std::size_t m : {0u, 3u}) {
    try {
      fast_forward_reduce(set, m);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBadCardinality);
    }
  }
}

TEST(Reduction, GreedyAgainstExhaustiveSubsets) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values(8);
    for (auto& v : values) v = u(rng);
    const auto set = testing::scalar_set(values);
    std::vector<std::vector<double>> pts;
    for (double v : values) pts.push_back({v});
    const std::vector<double> prob(8, 1.0 / 8.0);
    for (std::size_t m = 1; m <= 3; ++m) {
      const auto red = fast_forward_reduce(set, m);
      const auto best = oracle::best_subset(pts, prob, m);
      std::vector<int> kept(red.selection_order.begin(), red.selection_order.end());
      EXPECT_NEAR(red.distance_trace.back(), oracle::transport_cost(pts, prob, kept), 1e-12);
      EXPECT_GE(red.distance_trace.back(), best.distance - 1e-12);
      if (m == 1) {
        EXPECT_NEAR(red.distance_trace.back(), best.distance, 1e-12);
      }
      EXPECT_NEAR(red.reduced.total_probability(), 1.0, 1e-12);
    }
  }
}

TEST(Reduction, MassGoesToNearestKept) {
  const auto set = testing::scalar_set({0.0, 1.0, 10.0, 11.0, 0.2});
  const auto red = fast_forward_reduce(set, 2);
  ASSERT_EQ(red.reduced.size(), 2u);
  // kept scenarios keep their values bit for bit
  for (std::size_t k = 0; k < red.reduced.size(); ++k)
    EXPECT_EQ(red.reduced.scenarios[k].w_mw,
              set.scenarios[red.reduced.source_index[k]].w_mw);
  double low = 0.0, high = 0.0;
  for (const auto& s : red.reduced.scenarios) (s.w_mw[0] < 5 ? low : high) += s.probability;
  EXPECT_NEAR(low, 0.6, 1e-15);
  EXPECT_NEAR(high, 0.4, 1e-15);
}

TEST(Reduction, NestedDistancesNonIncreasing) {
  const auto net = network::make_feeder(network::day_type_feeder());
  const auto set = scenario::sample_scenarios(net, 0.6, {200, 5});
  const auto red = fast_forward_reduce(set, 10);
  for (std::size_t k = 1; k < red.distance_trace.size(); ++k)
    EXPECT_LE(red.distance_trace[k], red.distance_trace[k - 1]);
  EXPECT_NEAR(red.reduced.total_probability(), 1.0, 1e-12);
  EXPECT_GT(red.min_probability, 0.0);
}

}  // namespace
}  // namespace dsopf

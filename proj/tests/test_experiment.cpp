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

#include <filesystem>
#include "json.hpp"

#include "dsopf/error.hpp"
#include "dsopf/experiment.hpp"
#include "dsopf/io.hpp"
#include "support.hpp"

namespace dsopf {
namespace {

namespace fs = std::filesystem;

experiment::ExperimentSpec tiny_spec(const fs::path& root) {
  testing::ChainOptions o;
  o.r_ohm = 1.0;
  o.x_ohm = 1.2;
  io::write_text(root / "net.json", io::network_to_json(testing::tree(3, {0, 1, 1}, o)));
  experiment::ExperimentSpec spec;
  spec.network_ref = (root / "net.json").string();
  spec.day_types = {{"dim", 0.3}, {"bright", 0.8}};
  spec.generate_count = 6;
  spec.reduce_to = 2;
  spec.solver.rho = 2.0;
  spec.solver.rho_policy = admm::RhoPolicy::kFixed;
  spec.solver.max_iters = 3000;
  spec.k_list = {1.5};
  spec.baseline_day = "bright";
  spec.test_count = 3;
  spec.seed = 77;
  return spec;
}

std::vector<std::pair<std::string, std::string>> contents(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == "timing.json") continue;
    out.emplace_back(fs::relative(e.path(), dir).string(), io::read_text(e.path()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Experiment, SpecJsonRoundTrip) {
  experiment::ExperimentSpec spec;
  spec.k_list = {1.1, 1.3};
  spec.seed = 9;
  spec.solver.rho = 0.3;
  const auto text = experiment::spec_to_json(spec);
  const auto back = experiment::spec_from_json(text);
  EXPECT_EQ(experiment::spec_to_json(back), text);
  EXPECT_EQ(experiment::config_hash(back), experiment::config_hash(spec));
  EXPECT_EQ(experiment::config_hash(spec).size(), 16u);
  spec.seed = 10;
  EXPECT_NE(experiment::config_hash(back), experiment::config_hash(spec));
}

TEST(Experiment, Validation) {
  experiment::ExperimentSpec spec;
  spec.reduce_to = 0;
  EXPECT_THROW(experiment::validate(spec), Error);
  spec = {};
  spec.day_types = {{"x", 1.2}};
  spec.baseline_day = "x";
  EXPECT_THROW(experiment::validate(spec), Error);
  spec = {};
  spec.k_list = {1.2};
  spec.baseline_day = "foggy";
  EXPECT_THROW(experiment::validate(spec), Error);
  EXPECT_THROW(experiment::spec_from_json(R"({"solver": {"rho_policy": "sometimes"}})"), Error);
}

TEST(Experiment, RerunIsByteIdentical) {
  const fs::path root = fs::temp_directory_path() / "dsopf_experiment_test";
  fs::remove_all(root);
  auto spec = tiny_spec(root);
  spec.output_dir = root / "a";
  const auto first = experiment::run_experiment(spec);
  spec.output_dir = root / "b";
  const auto second = experiment::run_experiment(spec);
  EXPECT_EQ(first.config_hash, second.config_hash);
  ASSERT_EQ(first.day_types.size(), 2u);
  EXPECT_EQ(first.k_sweep.size(), second.k_sweep.size());

  const auto a = contents(root / "a");
  const auto b = contents(root / "b");
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].first, b[k].first);
    if (a[k].first == "manifest.json") continue;  // records its own output directory
    EXPECT_EQ(a[k].second, b[k].second) << a[k].first;
  }
  for (const char* f : {"manifest.json", "network.json", "dim/report.json", "bright/trace.csv",
                        "summary_day_types.csv", "baseline/k_sweep.json"})
    EXPECT_TRUE(fs::exists(root / "a" / f)) << f;
  const auto summary = experiment::render_summary(root / "a");
  EXPECT_NE(summary.find("dim"), std::string::npos);
  fs::remove_all(root);
}

TEST(Experiment, TablesUseFourSignificantDigits) {
  EXPECT_EQ(experiment::sig4(0.0123456), "0.01235");
  EXPECT_EQ(experiment::sig4(31810.0), "3.181e+04");
  experiment::KSweepRow row{"K=1.3", 0.25, 0.2647, 12, 0};
  EXPECT_NE(experiment::k_sweep_table({row}).find("0.2647"), std::string::npos);
}

}  // namespace
}  // namespace dsopf

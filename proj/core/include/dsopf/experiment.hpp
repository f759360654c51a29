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


#ifndef DSOPF_EXPERIMENT_HPP
#define DSOPF_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dsopf/admm.hpp"
#include "dsopf/network.hpp"
#include "dsopf/program.hpp"

namespace dsopf::experiment {

std::string_view version();

struct DayType {
  std::string name;
  double mean_ratio = 0.0;
};

/// Everything a study run depends on. All randomness is derived from `seed`;
/// the seed inside `solver` is ignored.
struct ExperimentSpec {
  /// Feeder preset ("day-type", "local-control", "step-size") or a network
  /// JSON file.
  std::string network_ref = "day-type";
  std::vector<DayType> day_types{{"cloudy", 0.3}, {"partly", 0.6}, {"sunny", 0.9}};
  std::size_t generate_count = 1000;
  std::size_t reduce_to = 7;
  admm::SolverConfig solver;
  double import_price = 0.0;
  double export_price = 0.0;
  double loss_weight = 1.0;
  /// Local-policy gains to sweep; empty skips the baseline stage.
  std::vector<double> k_list;
  /// Day type whose first-stage decision feeds the baseline stage.
  std::string baseline_day = "sunny";
  std::size_t test_count = 100;
  bool online = true;
  std::filesystem::path output_dir = "dsopf-out";
  std::uint64_t seed = 0;
};

void validate(const ExperimentSpec& spec);
std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const std::string& text);
/// 16 hex digits of FNV-1a over the canonical spec JSON, output_dir excluded.
std::string config_hash(const ExperimentSpec& spec);

/// Preset name or path to a network JSON file.
network::Network resolve_network(const std::string& ref);

struct DayTypeRow {
  std::string name;
  double mean_ratio = 0.0;
  double negative_utility = 0.0;
  double expected_cost = 0.0;
  double expected_losses_mw = 0.0;
  double total = 0.0;
  bool converged = false;
  int iterations = 0;
  double final_rho = 0.0;
};

struct KSweepRow {
  std::string method;  // "stochastic", "online" or "K=<value>"
  double expected_losses_mw = 0.0;
  double max_deviation = 0.0;
  int violating_scenarios = 0;
  int failed = 0;
};

struct ExperimentResult {
  std::filesystem::path directory;
  std::string config_hash;
  std::vector<DayTypeRow> day_types;
  std::vector<KSweepRow> k_sweep;
  int online_infeasible = 0;
  bool all_converged = true;
};

/// Runs the day-type study and, when k_list is set, the local-control
/// comparison. Writes
///   manifest.json, network.json,
///   <day>/{sampled,scenarios,reduction,report,verdict,timing}.json, <day>/trace.csv,
///   summary_day_types.{json,csv},
///   baseline/{test_scenarios,online,k_sweep}.json, baseline/*.csv.
/// JSON files other than timing.json are byte-identical across reruns.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Writes manifest.json for a single CLI command.
void write_manifest(const std::filesystem::path& path, std::string_view command,
                    std::uint64_t seed, const std::string& config_json);

/// printf("%.4g").
std::string sig4(double x);
std::string day_type_table(const std::vector<DayTypeRow>& rows);
std::string k_sweep_table(const std::vector<KSweepRow>& rows);
/// Tables of an experiment directory, read back from its summary files.
std::string render_summary(const std::filesystem::path& dir);

}  // namespace dsopf::experiment

#endif  // DSOPF_EXPERIMENT_HPP

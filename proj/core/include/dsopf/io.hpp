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

#ifndef DSOPF_IO_HPP
#define DSOPF_IO_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dsopf/admm.hpp"
#include "dsopf/baseline.hpp"
#include "dsopf/exactness.hpp"
#include "dsopf/network.hpp"
#include "dsopf/program.hpp"
#include "dsopf/scenario.hpp"

// Text serialization. JSON documents are in physical units with full double
// precision and sorted keys, so equal inputs give byte-identical files.
// Non-finite numbers are written as null.
namespace dsopf::io {

std::string read_text(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, const std::string& text);

std::string network_to_json(const network::Network& net);
network::Network network_from_json(const std::string& text);

std::string scenarios_to_json(const scenario::ScenarioSet& set);
/// Node keys absent from a scenario default to 0 injection.
scenario::ScenarioSet scenarios_from_json(const std::string& text, std::size_t node_count);

std::string solution_to_json(const program::StochasticProgram& program,
                             const program::Solution& sol);
program::Solution solution_from_json(const program::StochasticProgram& program,
                                     const std::string& text);
/// First-stage consumption in per-unit from either a solution document or
/// {"pc_mw": {node: value}}.
std::vector<double> pc_from_json(const network::Network& net, const std::string& text);

std::string audit_to_json(const program::AuditReport& audit);
std::string config_to_json(const admm::SolverConfig& config);

/// Convergence summary, objective terms, audit, complementarity and the
/// solution. Wall-clock times are kept out; see times_to_json.
std::string report_to_json(const program::StochasticProgram& program,
                           const admm::SolverConfig& config, const admm::SolveReport& report);
std::string times_to_json(const admm::PhaseTimes& times, double wall_seconds);
std::string trace_to_csv(const admm::Trace& trace);

std::string verdict_to_json(const exactness::ExactnessVerdict& verdict);

std::string metrics_to_json(const baseline::PolicyMetrics& metrics);
std::string cdf_to_csv(std::span<const baseline::CdfPoint> cdf);
std::string online_to_json(const program::StochasticProgram& program,
                           const baseline::OnlineResult& result);

}  // namespace dsopf::io

#endif  // DSOPF_IO_HPP

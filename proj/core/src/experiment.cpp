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


#include "dsopf/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "dsopf/baseline.hpp"
#include "dsopf/error.hpp"
#include "dsopf/exactness.hpp"
#include "dsopf/feeder.hpp"
#include "dsopf/io.hpp"
#include "dsopf/random.hpp"
#include "dsopf/scenario.hpp"
#include "json.hpp"

#ifndef DSOPF_VERSION
#define DSOPF_VERSION "0.0.0"
#endif

namespace dsopf::experiment {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kDeviationSlack = 1e-9;

json solver_json(const admm::SolverConfig& c) {
  return {{"rho", c.rho},
          {"rho_policy", c.rho_policy == admm::RhoPolicy::kAdaptive ? "adaptive" : "fixed"},
          {"eps_primal", c.eps_primal},
          {"eps_dual", c.eps_dual},
          {"socp_gap_tol", c.socp_gap_tol},
          {"max_iters", c.max_iters},
          {"init", c.init_policy == admm::InitPolicy::kRandom ? "random" : "zeros"},
          {"workers", c.workers}};
}

json spec_json(const ExperimentSpec& s) {
  json days = json::array();
  for (const auto& d : s.day_types) days.push_back({{"name", d.name}, {"mean_ratio", d.mean_ratio}});
  return {{"network", s.network_ref},
          {"day_types", days},
          {"generate_count", s.generate_count},
          {"reduce_to", s.reduce_to},
          {"solver", solver_json(s.solver)},
          {"objective",
           {{"import_price", s.import_price},
            {"export_price", s.export_price},
            {"loss_weight", s.loss_weight}}},
          {"k_list", s.k_list},
          {"baseline_day", s.baseline_day},
          {"test_count", s.test_count},
          {"online", s.online},
          {"output_dir", s.output_dir.generic_string()},
          {"seed", s.seed}};
}

std::string fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double as_double(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

// Rethrows library errors with the stage that raised them.
template <typename F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), "stage '" + name + "': " + e.what());
  }
}

int count_violations(const baseline::PolicyMetrics& m, double eps) {
  int n = 0;
  for (double d : m.scenario_max_deviation)
    if (std::isfinite(d) && d > eps + kDeviationSlack) ++n;
  return n;
}

KSweepRow make_row(std::string method, const baseline::PolicyMetrics& m, double eps) {
  return {std::move(method), m.expected_losses_mw, m.max_deviation, count_violations(m, eps),
          m.failed};
}

json row_json(const DayTypeRow& r) {
  return {{"name", r.name},
          {"mean_ratio", r.mean_ratio},
          {"negative_utility", number(r.negative_utility)},
          {"expected_cost", number(r.expected_cost)},
          {"expected_losses_mw", number(r.expected_losses_mw)},
          {"total", number(r.total)},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"final_rho", number(r.final_rho)}};
}

json row_json(const KSweepRow& r) {
  return {{"method", r.method},
          {"expected_losses_mw", number(r.expected_losses_mw)},
          {"max_deviation", number(r.max_deviation)},
          {"violating_scenarios", r.violating_scenarios},
          {"failed", r.failed}};
}

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

}  // namespace

std::string_view version() { return DSOPF_VERSION; }

void validate(const ExperimentSpec& s) {
  if (s.day_types.empty()) throw Error(ErrorCode::kBadParameter, "no day types");
  for (const auto& d : s.day_types) {
    if (d.name.empty()) throw Error(ErrorCode::kBadParameter, "day type without a name");
    if (!(d.mean_ratio > 0.0 && d.mean_ratio < 1.0))
      throw Error(ErrorCode::kOutOfRange, "day type '" + d.name + "': mean ratio not in (0,1)");
  }
  if (s.generate_count == 0 || s.reduce_to == 0 || s.reduce_to > s.generate_count)
    throw Error(ErrorCode::kBadCardinality, "need 1 <= reduce_to <= generate_count");
  if (!s.k_list.empty()) {
    if (s.test_count == 0) throw Error(ErrorCode::kBadCardinality, "test_count must be positive");
    bool found = false;
    for (const auto& d : s.day_types) found = found || d.name == s.baseline_day;
    if (!found)
      throw Error(ErrorCode::kBadParameter, "baseline day '" + s.baseline_day + "' not listed");
  }
  admm::validate(s.solver);
  program::ObjectiveConfig obj{s.import_price, s.export_price, s.loss_weight, std::nullopt};
  program::validate(obj);
}

std::string spec_to_json(const ExperimentSpec& spec) { return spec_json(spec).dump(2) + "\n"; }

ExperimentSpec spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("experiment spec: ") + e.what());
  }
  ExperimentSpec s;
  try {
    s.network_ref = j.value("network", s.network_ref);
    if (j.contains("day_types")) {
      s.day_types.clear();
      for (const auto& d : j["day_types"])
        s.day_types.push_back({d.at("name").get<std::string>(), d.at("mean_ratio").get<double>()});
    }
    s.generate_count = j.value("generate_count", s.generate_count);
    s.reduce_to = j.value("reduce_to", s.reduce_to);
    if (j.contains("solver")) {
      const auto& c = j["solver"];
      s.solver.rho = c.value("rho", s.solver.rho);
      const std::string policy = c.value("rho_policy", std::string("adaptive"));
      if (policy != "adaptive" && policy != "fixed")
        throw Error(ErrorCode::kBadParameter, "rho_policy must be fixed or adaptive");
      s.solver.rho_policy = policy == "fixed" ? admm::RhoPolicy::kFixed : admm::RhoPolicy::kAdaptive;
      s.solver.eps_primal = c.value("eps_primal", s.solver.eps_primal);
      s.solver.eps_dual = c.value("eps_dual", s.solver.eps_dual);
      s.solver.socp_gap_tol = c.value("socp_gap_tol", s.solver.socp_gap_tol);
      s.solver.max_iters = c.value("max_iters", s.solver.max_iters);
      const std::string init = c.value("init", std::string("random"));
      if (init != "random" && init != "zeros")
        throw Error(ErrorCode::kBadParameter, "init must be zeros or random");
      s.solver.init_policy = init == "zeros" ? admm::InitPolicy::kZeros : admm::InitPolicy::kRandom;
      s.solver.workers = c.value("workers", s.solver.workers);
    }
    if (j.contains("objective")) {
      const auto& o = j["objective"];
      s.import_price = o.value("import_price", s.import_price);
      s.export_price = o.value("export_price", s.export_price);
      s.loss_weight = o.value("loss_weight", s.loss_weight);
    }
    s.k_list = j.value("k_list", s.k_list);
    s.baseline_day = j.value("baseline_day", s.baseline_day);
    s.test_count = j.value("test_count", s.test_count);
    s.online = j.value("online", s.online);
    s.output_dir = j.value("output_dir", s.output_dir.generic_string());
    s.seed = j.value("seed", s.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadParameter, std::string("experiment spec: ") + e.what());
  }
  return s;
}

std::string config_hash(const ExperimentSpec& spec) {
  auto j = spec_json(spec);
  j.erase("output_dir");  // where results go is not part of the configuration
  return fnv1a(j.dump());
}

network::Network resolve_network(const std::string& ref) {
  if (ref == "day-type") return network::make_feeder(network::day_type_feeder());
  if (ref == "local-control") return network::make_feeder(network::local_control_feeder());
  if (ref == "step-size") return network::make_feeder(network::step_size_feeder());
  if (!fs::exists(ref))
    throw Error(ErrorCode::kBadParameter, "network '" + ref + "' is neither a preset nor a file");
  return io::network_from_json(io::read_text(ref));
}

void write_manifest(const fs::path& path, std::string_view command, std::uint64_t seed,
                    const std::string& config_json) {
  json config = json::parse(config_json);
  json m = {{"command", std::string(command)},
            {"seed", seed},
            {"config_hash", fnv1a(config.dump())},
            {"config", config},
            {"versions",
             {{"dsopf", std::string(version())},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
  write_json(path, m);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  const fs::path dir = spec.output_dir;
  ExperimentResult result;
  result.directory = dir;
  result.config_hash = config_hash(spec);

  write_manifest(dir / "manifest.json", "run-experiment", spec.seed, spec_to_json(spec));
  const network::Network net = stage("network", [&] { return resolve_network(spec.network_ref); });
  io::write_text(dir / "network.json", io::network_to_json(net));

  const program::ObjectiveConfig objective{spec.import_price, spec.export_price,
                                           spec.loss_weight, std::nullopt};
  std::optional<program::StochasticProgram> baseline_program;
  std::vector<double> baseline_pc;
  double baseline_ratio = 0.0;
  program::Solution baseline_solution;

  for (const auto& day : spec.day_types) {
    const fs::path sub = dir / day.name;
    const std::string tag = "day type " + day.name;
    scenario::SamplingOptions opts;
    opts.count = spec.generate_count;
    opts.seed = derive_seed(spec.seed, "scenarios/" + day.name);
    const auto sampled =
        stage(tag + " sampling", [&] { return scenario::sample_scenarios(net, day.mean_ratio, opts); });
    const auto red = stage(tag + " reduction",
                           [&] { return scenario::fast_forward_reduce(sampled, spec.reduce_to); });
    io::write_text(sub / "sampled.json", io::scenarios_to_json(sampled));
    io::write_text(sub / "scenarios.json", io::scenarios_to_json(red.reduced));
    write_json(sub / "reduction.json", {{"selection_order", red.selection_order},
                                        {"distance_trace", red.distance_trace},
                                        {"min_probability", red.min_probability}});

    auto prog = stage(tag + " assembly", [&] {
      return program::StochasticProgram::assemble(net, red.reduced, objective);
    });
    admm::SolverConfig cfg = spec.solver;
    cfg.seed = derive_seed(spec.seed, "solver/" + day.name);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = stage(tag + " solve", [&] { return admm::solve(prog, cfg); });
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    io::write_text(sub / "report.json", io::report_to_json(prog, cfg, rep));
    io::write_text(sub / "trace.csv", io::trace_to_csv(rep.trace));
    io::write_text(sub / "timing.json", io::times_to_json(rep.times, wall));
    const auto verdict = stage(tag + " exactness", [&] { return exactness::check_exactness(prog); });
    io::write_text(sub / "verdict.json", io::verdict_to_json(verdict));

    const auto obj = program::objective_breakdown(prog, rep.solution);
    result.day_types.push_back({day.name, day.mean_ratio, obj.negative_utility, obj.expected_cost,
                                obj.expected_losses_mw, obj.total, rep.converged, rep.iterations,
                                rep.final_rho});
    result.all_converged = result.all_converged && rep.converged;
    if (day.name == spec.baseline_day) {
      baseline_program.emplace(prog);
      baseline_pc = rep.solution.pc;
      baseline_ratio = day.mean_ratio;
      baseline_solution = rep.solution;
    }
  }

  json rows = json::array();
  for (const auto& r : result.day_types) rows.push_back(row_json(r));
  write_json(dir / "summary_day_types.json", rows);
  {
    std::string csv = "day_type,mean_ratio,negative_utility,expected_cost,expected_losses_mw,total,"
                      "converged,iterations,final_rho\n";
    for (const auto& r : result.day_types)
      csv += r.name + "," + sig4(r.mean_ratio) + "," + sig4(r.negative_utility) + "," +
             sig4(r.expected_cost) + "," + sig4(r.expected_losses_mw) + "," + sig4(r.total) + "," +
             (r.converged ? "true" : "false") + "," + std::to_string(r.iterations) + "," +
             sig4(r.final_rho) + "\n";
    io::write_text(dir / "summary_day_types.csv", csv);
  }

  if (spec.k_list.empty()) return result;

  const fs::path bdir = dir / "baseline";
  const double eps = net.epsilon();
  scenario::SamplingOptions topts;
  topts.count = spec.test_count;
  topts.seed = derive_seed(spec.seed, "test-scenarios");
  const auto test =
      stage("test sampling", [&] { return scenario::sample_scenarios(net, baseline_ratio, topts); });
  io::write_text(bdir / "test_scenarios.json", io::scenarios_to_json(test));
  const auto test_prog = baseline_program->with_scenarios(test);

  const auto train = baseline::solution_metrics(*baseline_program, baseline_solution);
  result.k_sweep.push_back(make_row("stochastic", train, eps));

  if (spec.online) {
    admm::SolverConfig cfg = spec.solver;
    cfg.seed = derive_seed(spec.seed, "online");
    const auto online = stage("online second stage", [&] {
      return baseline::online_second_stage(test_prog, baseline_pc, cfg);
    });
    io::write_text(bdir / "online.json", io::online_to_json(test_prog, online));
    const auto m = baseline::solution_metrics(test_prog, online.solution);
    io::write_text(bdir / "cdf_online.csv", io::cdf_to_csv(m.cdf));
    result.k_sweep.push_back(make_row("online", m, eps));
    result.online_infeasible = online.infeasible;
  }

  for (double K : spec.k_list) {
    const auto m = stage("local policy K=" + sig4(K),
                         [&] { return baseline::evaluate_policy(test_prog, baseline_pc, K); });
    io::write_text(bdir / ("cdf_K" + sig4(K) + ".csv"), io::cdf_to_csv(m.cdf));
    io::write_text(bdir / ("metrics_K" + sig4(K) + ".json"), io::metrics_to_json(m));
    result.k_sweep.push_back(make_row("K=" + sig4(K), m, eps));
  }

  json krows = json::array();
  for (const auto& r : result.k_sweep) krows.push_back(row_json(r));
  write_json(bdir / "k_sweep.json", {{"rows", krows},
                                      {"epsilon", eps},
                                      {"online_infeasible", result.online_infeasible}});
  std::string csv = "method,expected_losses_mw,max_deviation,violating_scenarios,failed\n";
  for (const auto& r : result.k_sweep)
    csv += r.method + "," + sig4(r.expected_losses_mw) + "," + sig4(r.max_deviation) + "," +
           std::to_string(r.violating_scenarios) + "," + std::to_string(r.failed) + "\n";
  io::write_text(bdir / "k_sweep.csv", csv);
  return result;
}

std::string sig4(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string day_type_table(const std::vector<DayTypeRow>& rows) {
  std::string out = pad("day type", 10) + pad("-utility", 12) + pad("cost", 12) +
                    pad("losses MW", 12) + pad("total", 12) + "converged\n";
  for (const auto& r : rows)
    out += pad(r.name, 10) + pad(sig4(r.negative_utility), 12) + pad(sig4(r.expected_cost), 12) +
           pad(sig4(r.expected_losses_mw), 12) + pad(sig4(r.total), 12) +
           (r.converged ? "yes" : "no") + " (" + std::to_string(r.iterations) + " it)\n";
  return out;
}

std::string k_sweep_table(const std::vector<KSweepRow>& rows) {
  std::string out = pad("method", 12) + pad("losses MW", 12) + pad("max dev", 12) + "violations\n";
  for (const auto& r : rows)
    out += pad(r.method, 12) + pad(sig4(r.expected_losses_mw), 12) +
           pad(sig4(r.max_deviation), 12) + std::to_string(r.violating_scenarios) + "\n";
  return out;
}

std::string render_summary(const fs::path& dir) {
  std::string out;
  const fs::path days = dir / "summary_day_types.json";
  if (fs::exists(days)) {
    std::vector<DayTypeRow> rows;
    for (const auto& j : json::parse(io::read_text(days))) {
      DayTypeRow r;
      r.name = j.at("name").get<std::string>();
      r.mean_ratio = as_double(j.at("mean_ratio"));
      r.negative_utility = as_double(j.at("negative_utility"));
      r.expected_cost = as_double(j.at("expected_cost"));
      r.expected_losses_mw = as_double(j.at("expected_losses_mw"));
      r.total = as_double(j.at("total"));
      r.converged = j.at("converged").get<bool>();
      r.iterations = j.at("iterations").get<int>();
      rows.push_back(r);
    }
    out += day_type_table(rows);
  }
  const fs::path sweep = dir / "baseline" / "k_sweep.json";
  if (fs::exists(sweep)) {
    std::vector<KSweepRow> rows;
    for (const auto& j : json::parse(io::read_text(sweep)).at("rows")) {
      KSweepRow r;
      r.method = j.at("method").get<std::string>();
      r.expected_losses_mw = as_double(j.at("expected_losses_mw"));
      r.max_deviation = as_double(j.at("max_deviation"));
      r.violating_scenarios = j.at("violating_scenarios").get<int>();
      r.failed = j.at("failed").get<int>();
      rows.push_back(r);
    }
    if (!out.empty()) out += "\n";
    out += k_sweep_table(rows);
  }
  if (out.empty()) throw Error(ErrorCode::kIo, "no summary files in " + dir.string());
  return out;
}

}  // namespace dsopf::experiment

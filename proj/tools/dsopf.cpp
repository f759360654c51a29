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


// dsopf command-line driver. Exit codes: 0 success, 2 invalid input,
// 3 solver did not converge, 4 infeasible result.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dsopf/admm.hpp"
#include "dsopf/baseline.hpp"
#include "dsopf/error.hpp"
#include "dsopf/exactness.hpp"
#include "dsopf/experiment.hpp"
#include "dsopf/feeder.hpp"
#include "dsopf/io.hpp"
#include "dsopf/program.hpp"
#include "dsopf/random.hpp"
#include "dsopf/scenario.hpp"

namespace fs = std::filesystem;
using namespace dsopf;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kNotConverged = 3;
constexpr int kInfeasible = 4;

struct SolverFlags {
  double rho = 100.0;
  std::string rho_policy = "adaptive";
  double eps = 1e-5;
  double gap_tol = 1e-3;
  int max_iters = 20000;
  std::string init = "random";
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  double import_price = 0.0;
  double export_price = 0.0;
  double loss_weight = 1.0;
  bool force_qw_zero = false;

  void attach(CLI::App* app) {
    app->add_option("--rho", rho, "initial penalty")->capture_default_str();
    app->add_option("--rho-policy", rho_policy)
        ->check(CLI::IsMember({"fixed", "adaptive"}))
        ->capture_default_str();
    app->add_option("--eps", eps, "primal and dual residual tolerance")->capture_default_str();
    app->add_option("--gap-tol", gap_tol, "relaxation gap tolerance, pu^2")->capture_default_str();
    app->add_option("--max-iters", max_iters)->capture_default_str();
    app->add_option("--init", init)->check(CLI::IsMember({"zeros", "random"}))->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--workers", workers, "threads, 0 = hardware")->capture_default_str();
    app->add_option("--import-price", import_price, "a")->capture_default_str();
    app->add_option("--export-price", export_price, "b")->capture_default_str();
    app->add_option("--loss-weight", loss_weight, "K_loss")->capture_default_str();
    app->add_flag("--force-qw-zero", force_qw_zero, "disable inverter reactive power");
  }

  admm::SolverConfig config() const {
    admm::SolverConfig c;
    c.rho = rho;
    c.rho_policy = rho_policy == "fixed" ? admm::RhoPolicy::kFixed : admm::RhoPolicy::kAdaptive;
    c.eps_primal = eps;
    c.eps_dual = eps;
    c.socp_gap_tol = gap_tol;
    c.max_iters = max_iters;
    c.init_policy = init == "zeros" ? admm::InitPolicy::kZeros : admm::InitPolicy::kRandom;
    c.seed = seed;
    c.workers = workers;
    c.force_qw_zero = force_qw_zero;
    return c;
  }

  program::ObjectiveConfig objective() const {
    return {import_price, export_price, loss_weight, std::nullopt};
  }
};

fs::path manifest_path(const fs::path& out) {
  return out.parent_path() / (out.stem().string() + ".manifest.json");
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    io::write_text(out, text);
}

// Manifest next to `out`; nothing when writing to stdout.
void manifest(const std::string& out, const char* command, std::uint64_t seed,
              const std::map<std::string, std::string>& args) {
  if (out.empty() || out == "-") return;
  std::string cfg = "{";
  bool first = true;
  for (const auto& [k, v] : args) {
    std::string esc;
    for (char c : v) {
      if (c == '"' || c == '\\') esc += '\\';
      esc += c;
    }
    cfg += std::string(first ? "" : ",") + "\"" + k + "\":\"" + esc + "\"";
    first = false;
  }
  cfg += "}";
  experiment::write_manifest(manifest_path(out), command, seed, cfg);
}

std::string str(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

network::Network load_network(const std::string& ref) { return experiment::resolve_network(ref); }

scenario::ScenarioSet load_scenarios(const network::Network& net, const std::string& path) {
  return io::scenarios_from_json(io::read_text(path), net.node_count());
}

std::map<std::string, std::string> solver_args(const SolverFlags& f) {
  return {{"rho", str(f.rho)},
          {"rho_policy", f.rho_policy},
          {"eps", str(f.eps)},
          {"gap_tol", str(f.gap_tol)},
          {"max_iters", std::to_string(f.max_iters)},
          {"init", f.init},
          {"seed", std::to_string(f.seed)},
          {"import_price", str(f.import_price)},
          {"export_price", str(f.export_price)},
          {"loss_weight", str(f.loss_weight)},
          {"force_qw_zero", f.force_qw_zero ? "true" : "false"}};
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kNotConverged:
      return kNotConverged;
    default:
      return kInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized stochastic optimal power flow for radial feeders"};
  app.set_version_flag("--version", std::string(experiment::version()));
  app.require_subcommand(1);

  // build-network
  auto* bn = app.add_subcommand("build-network", "write a parametric trunk-and-laterals feeder");
  std::string bn_preset, bn_out;
  network::FeederSpec fs_spec;
  std::vector<std::string> bn_laterals, bn_overrides;
  bn->add_option("--preset", bn_preset, "day-type | local-control | step-size")
      ->check(CLI::IsMember({"day-type", "local-control", "step-size"}));
  auto* bn_trunk = bn->add_option("--trunk", fs_spec.trunk_length, "trunk nodes");
  bn->add_option("--lateral", bn_laterals, "BRANCH:LENGTH, repeatable");
  bn->add_option("--spacing-km", fs_spec.spacing_km);
  bn->add_option("--r-ohm-per-km", fs_spec.r_ohm_per_km);
  bn->add_option("--x-ohm-per-km", fs_spec.x_ohm_per_km);
  bn->add_option("--l-max", fs_spec.l_max_ka2, "kA^2");
  bn->add_option("--load-mw", fs_spec.p_load_mw);
  bn->add_option("--pf", fs_spec.power_factor);
  bn->add_option("--pc-max-mw", fs_spec.pc_max_mw);
  bn->add_option("--k-u", fs_spec.utility_weight);
  bn->add_option("--q-s", fs_spec.shunt_q);
  bn->add_option("--pv-mva", fs_spec.pv_capacity_mva);
  bn->add_option("--pv-fraction", fs_spec.pv_fraction);
  bn->add_option("--pv-override", bn_overrides, "NODE:MVA, repeatable");
  bn->add_option("--seed", fs_spec.seed, "selects PV nodes when pv-fraction < 1");
  bn->add_option("--epsilon", fs_spec.bases.epsilon);
  bn->add_option("--v0-kv", fs_spec.bases.v0_kv);
  bn->add_option("--s-base-mva", fs_spec.bases.s_base_mva);
  bn->add_option("--out", bn_out, "output JSON (default stdout)");

  // generate-scenarios
  auto* gs = app.add_subcommand("generate-scenarios", "sample PV scenarios from the beta model");
  std::string gs_net, gs_out, gs_corr = "independent";
  double gs_ratio = 0.5;
  std::size_t gs_count = 1000;
  std::uint64_t gs_seed = 0;
  gs->add_option("--network", gs_net, "network JSON or preset")->required();
  gs->add_option("--mean-ratio", gs_ratio)->required();
  gs->add_option("--count", gs_count)->capture_default_str();
  gs->add_option("--seed", gs_seed)->capture_default_str();
  gs->add_option("--correlation", gs_corr)->check(CLI::IsMember({"independent", "common"}));
  gs->add_option("--out", gs_out);

  // reduce
  auto* rd = app.add_subcommand("reduce", "fast-forward scenario reduction");
  std::string rd_net, rd_in, rd_out, rd_metric = "euclidean";
  std::size_t rd_to = 7;
  rd->add_option("--network", rd_net)->required();
  rd->add_option("--scenarios", rd_in)->required();
  rd->add_option("--to", rd_to)->capture_default_str();
  rd->add_option("--metric", rd_metric)->check(CLI::IsMember({"euclidean", "l1"}));
  rd->add_option("--out", rd_out);

  // solve
  auto* sv = app.add_subcommand("solve", "solve the stochastic program by ADMM");
  std::string sv_net, sv_scen, sv_out, sv_trace, sv_timing, sv_pc;
  SolverFlags sv_flags;
  sv->add_option("--network", sv_net)->required();
  sv->add_option("--scenarios", sv_scen)->required();
  sv->add_option("--fixed-pc", sv_pc, "pin the first stage to a solution or pc file");
  sv_flags.attach(sv);
  sv->add_option("--out", sv_out, "report JSON");
  sv->add_option("--trace", sv_trace, "trace CSV");
  sv->add_option("--timing", sv_timing, "wall-clock JSON");

  // check-exactness
  auto* ce = app.add_subcommand("check-exactness", "evaluate the relaxation exactness condition");
  std::string ce_net, ce_scen, ce_out;
  bool ce_mind = false;
  ce->add_option("--network", ce_net)->required();
  ce->add_option("--scenarios", ce_scen)->required();
  ce->add_flag("--m-independent", ce_mind, "gate on the scenario-independent condition");
  ce->add_option("--out", ce_out);

  // baseline
  auto* bl = app.add_subcommand("baseline", "evaluate the local volt/VAR policy");
  std::string bl_net, bl_pc, bl_test, bl_out, bl_cdf;
  std::vector<double> bl_k;
  bl->add_option("--network", bl_net)->required();
  bl->add_option("--pc", bl_pc, "solution or pc JSON")->required();
  bl->add_option("--k", bl_k, "policy gain, repeatable")->required();
  bl->add_option("--test-scenarios", bl_test)->required();
  bl->add_option("--out", bl_out, "metrics JSON");
  bl->add_option("--cdf", bl_cdf, "CDF CSV (one K) or directory (several)");

  // online-eval
  auto* oe = app.add_subcommand("online-eval", "re-solve the second stage on test scenarios");
  std::string oe_net, oe_pc, oe_test, oe_out, oe_cdf;
  SolverFlags oe_flags;
  oe->add_option("--network", oe_net)->required();
  oe->add_option("--pc", oe_pc)->required();
  oe->add_option("--test-scenarios", oe_test)->required();
  oe_flags.attach(oe);
  oe->add_option("--out", oe_out);
  oe->add_option("--cdf", oe_cdf);

  // run-experiment
  auto* rx = app.add_subcommand("run-experiment", "run the full study into a directory");
  std::string rx_spec, rx_dir, rx_net;
  std::optional<std::uint64_t> rx_seed;
  std::optional<int> rx_iters;
  rx->add_option("--spec", rx_spec, "experiment JSON; defaults otherwise");
  rx->add_option("--network", rx_net, "override the network reference");
  rx->add_option("--out-dir", rx_dir, "override the output directory");
  rx->add_option("--seed", rx_seed, "override the root seed");
  rx->add_option("--max-iters", rx_iters, "override the solver iteration cap");

  // report
  auto* rp = app.add_subcommand("report", "print summary tables of an experiment directory");
  std::string rp_dir;
  rp->add_option("dir", rp_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*bn) {
      if (!bn_preset.empty()) {
        if (bn_preset == "day-type") fs_spec = network::day_type_feeder();
        if (bn_preset == "local-control") fs_spec = network::local_control_feeder();
        if (bn_preset == "step-size") fs_spec = network::step_size_feeder();
      }
      if (!bn_laterals.empty() || bn_trunk->count() > 0) {
        fs_spec.laterals.clear();
        for (const auto& s : bn_laterals) {
          const auto c = s.find(':');
          if (c == std::string::npos)
            throw Error(ErrorCode::kBadParameter, "--lateral expects BRANCH:LENGTH");
          fs_spec.laterals.push_back({std::stoi(s.substr(0, c)), std::stoi(s.substr(c + 1))});
        }
      }
      for (const auto& s : bn_overrides) {
        const auto c = s.find(':');
        if (c == std::string::npos)
          throw Error(ErrorCode::kBadParameter, "--pv-override expects NODE:MVA");
        fs_spec.pv_overrides[std::stoi(s.substr(0, c))] = std::stod(s.substr(c + 1));
      }
      const auto net = network::make_feeder(fs_spec);
      emit(bn_out, io::network_to_json(net));
      manifest(bn_out, "build-network", fs_spec.seed,
               {{"preset", bn_preset}, {"trunk", std::to_string(fs_spec.trunk_length)}});
      return kOk;
    }

    if (*gs) {
      const auto net = load_network(gs_net);
      scenario::SamplingOptions o;
      o.count = gs_count;
      o.seed = gs_seed;
      o.correlation = gs_corr == "common" ? scenario::Correlation::kCommonFactor
                                          : scenario::Correlation::kIndependent;
      emit(gs_out, io::scenarios_to_json(scenario::sample_scenarios(net, gs_ratio, o)));
      manifest(gs_out, "generate-scenarios", gs_seed,
               {{"network", gs_net},
                {"mean_ratio", str(gs_ratio)},
                {"count", std::to_string(gs_count)},
                {"correlation", gs_corr}});
      return kOk;
    }

    if (*rd) {
      const auto net = load_network(rd_net);
      const auto full = load_scenarios(net, rd_in);
      const auto red = scenario::fast_forward_reduce(
          full, rd_to, rd_metric == "l1" ? scenario::Metric::kL1 : scenario::Metric::kEuclidean);
      emit(rd_out, io::scenarios_to_json(red.reduced));
      manifest(rd_out, "reduce", full.seed,
               {{"network", rd_net}, {"scenarios", rd_in}, {"to", std::to_string(rd_to)},
                {"metric", rd_metric}});
      std::fprintf(stderr, "kantorovich distance %.6g\n", red.distance_trace.back());
      return kOk;
    }

    if (*sv) {
      const auto net = load_network(sv_net);
      const auto prog = program::StochasticProgram::assemble(net, load_scenarios(net, sv_scen),
                                                             sv_flags.objective());
      auto cfg = sv_flags.config();
      if (!sv_pc.empty()) cfg.fixed_pc = io::pc_from_json(net, io::read_text(sv_pc));
      const auto t0 = std::chrono::steady_clock::now();
      const auto rep = admm::solve(prog, cfg);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      emit(sv_out, io::report_to_json(prog, cfg, rep));
      if (!sv_trace.empty()) io::write_text(sv_trace, io::trace_to_csv(rep.trace));
      if (!sv_timing.empty()) io::write_text(sv_timing, io::times_to_json(rep.times, wall));
      auto args = solver_args(sv_flags);
      args["network"] = sv_net;
      args["scenarios"] = sv_scen;
      args["fixed_pc"] = sv_pc;
      manifest(sv_out, "solve", sv_flags.seed, args);
      std::fprintf(stderr, "%s after %d iterations: r=%.3e s=%.3e gap=%.3e rho=%.4g\n",
                   rep.converged ? "converged" : "not converged", rep.iterations, rep.final_r,
                   rep.final_s, rep.final_gap, rep.final_rho);
      if (!rep.converged) return kNotConverged;
      if (!program::feasibility_audit(prog, rep.solution, 1e-4).pass) return kInfeasible;
      return kOk;
    }

    if (*ce) {
      const auto net = load_network(ce_net);
      const auto prog =
          program::StochasticProgram::assemble(net, load_scenarios(net, ce_scen), {});
      const auto v = exactness::check_exactness(prog);
      emit(ce_out, io::verdict_to_json(v));
      manifest(ce_out, "check-exactness", 0,
               {{"network", ce_net}, {"scenarios", ce_scen},
                {"m_independent", ce_mind ? "true" : "false"}});
      const bool pass = ce_mind ? v.m_independent_pass : v.all_scenarios_pass;
      std::fprintf(stderr, "exactness condition %s\n", pass ? "holds" : "fails");
      return kOk;
    }

    if (*bl) {
      const auto net = load_network(bl_net);
      const auto pc = io::pc_from_json(net, io::read_text(bl_pc));
      const auto prog =
          program::StochasticProgram::assemble(net, load_scenarios(net, bl_test), {});
      std::string doc = "{\n";
      for (std::size_t k = 0; k < bl_k.size(); ++k) {
        const auto m = baseline::evaluate_policy(prog, pc, bl_k[k]);
        const std::string label = experiment::sig4(bl_k[k]);
        doc += "\"K=" + label + "\": " + io::metrics_to_json(m) + (k + 1 < bl_k.size() ? "," : "");
        if (!bl_cdf.empty()) {
          const fs::path p = bl_k.size() == 1 ? fs::path(bl_cdf)
                                              : fs::path(bl_cdf) / ("cdf_K" + label + ".csv");
          io::write_text(p, io::cdf_to_csv(m.cdf));
        }
        std::fprintf(stderr, "K=%s losses %.4g MW, max deviation %.4g\n", label.c_str(),
                     m.expected_losses_mw, m.max_deviation);
      }
      doc += "}\n";
      emit(bl_out, doc);
      std::string ks;
      for (double k : bl_k) ks += str(k) + " ";
      manifest(bl_out, "baseline", prog.scenarios().seed,
               {{"network", bl_net}, {"pc", bl_pc}, {"test_scenarios", bl_test}, {"k", ks}});
      return kOk;
    }

    if (*oe) {
      const auto net = load_network(oe_net);
      const auto pc = io::pc_from_json(net, io::read_text(oe_pc));
      const auto prog = program::StochasticProgram::assemble(net, load_scenarios(net, oe_test),
                                                             oe_flags.objective());
      const auto result = baseline::online_second_stage(prog, pc, oe_flags.config());
      emit(oe_out, io::online_to_json(prog, result));
      if (!oe_cdf.empty())
        io::write_text(oe_cdf,
                       io::cdf_to_csv(baseline::solution_metrics(prog, result.solution).cdf));
      auto args = solver_args(oe_flags);
      args["network"] = oe_net;
      args["pc"] = oe_pc;
      args["test_scenarios"] = oe_test;
      manifest(oe_out, "online-eval", oe_flags.seed, args);
      std::fprintf(stderr, "%d of %zu scenarios infeasible\n", result.infeasible,
                   result.outcomes.size());
      return result.infeasible > 0 ? kInfeasible : kOk;
    }

    if (*rx) {
      experiment::ExperimentSpec spec;
      if (!rx_spec.empty()) spec = experiment::spec_from_json(io::read_text(rx_spec));
      if (!rx_net.empty()) spec.network_ref = rx_net;
      if (!rx_dir.empty()) spec.output_dir = rx_dir;
      if (rx_seed) spec.seed = *rx_seed;
      if (rx_iters) spec.solver.max_iters = *rx_iters;
      const auto result = experiment::run_experiment(spec);
      std::cout << experiment::day_type_table(result.day_types);
      if (!result.k_sweep.empty()) std::cout << "\n" << experiment::k_sweep_table(result.k_sweep);
      if (!result.all_converged) return kNotConverged;
      if (result.online_infeasible > 0) return kInfeasible;
      return kOk;
    }

    if (*rp) {
      std::cout << experiment::render_summary(rp_dir);
      return kOk;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "dsopf: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dsopf: %s\n", e.what());
    return kInvalid;
  }
  return kOk;
}

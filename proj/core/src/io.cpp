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


#include "dsopf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dsopf/error.hpp"
#include "json.hpp"

namespace dsopf::io {
namespace {

using nlohmann::json;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string(what) + ": " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null())
    throw Error(ErrorCode::kBadParameter, where + ": missing '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kBadParameter, where + ": bad type for '" + key + "'");
  }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

json node_map(std::span<const double> values, std::size_t first, double scale) {
  json out = json::object();
  for (std::size_t i = first; i < values.size(); ++i)
    out[std::to_string(i)] = number(values[i] * scale);
  return out;
}

std::vector<double> read_node_map(const json& j, std::size_t n, double scale,
                                  const std::string& where) {
  std::vector<double> out(n, 0.0);
  if (!j.is_object()) throw Error(ErrorCode::kBadParameter, where + ": expected a node map");
  for (const auto& [key, value] : j.items()) {
    std::size_t pos = 0;
    int id = -1;
    try {
      id = std::stoi(key, &pos);
    } catch (const std::exception&) {
    }
    if (pos != key.size() || id < 0 || static_cast<std::size_t>(id) >= n)
      throw Error(ErrorCode::kUnknownNode, where + ": node key '" + key + "'");
    out[id] = value.is_null() ? 0.0 : value.get<double>() / scale;
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string csv_number(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json solution_json(const program::StochasticProgram& program, const program::Solution& sol) {
  const auto& pu = program.network().per_unit();
  const double s = pu.s_base_mva;
  const double v2 = pu.v_base_kv * pu.v_base_kv;
  const double i2 = pu.current_base() * pu.current_base();
  json out;
  out["pc_mw"] = node_map(sol.pc, 1, s);
  json scen = json::array();
  for (std::size_t m = 0; m < sol.scenarios.size(); ++m) {
    const auto& f = sol.scenarios[m];
    json b;
    if (m < program.scenario_count()) b["pi"] = program.probability(m);
    b["P_mw"] = node_map(f.P, 0, s);
    b["Q_mvar"] = node_map(f.Q, 0, s);
    b["v_kv2"] = node_map(f.v, 0, v2);
    b["l_ka2"] = node_map(f.l, 1, i2);
    b["qw_mvar"] = node_map(f.qw, 1, s);
    b["p0_plus_mw"] = number(f.p0_plus * s);
    b["p0_minus_mw"] = number(f.p0_minus * s);
    scen.push_back(std::move(b));
  }
  out["scenarios"] = std::move(scen);
  return out;
}

json audit_json(const program::AuditReport& audit) {
  json fam = json::object();
  for (const auto& f : audit.families)
    fam[f.name] = {{"worst", number(f.worst)}, {"node", f.node}, {"scenario", f.scenario}};
  return {{"families", fam},
          {"socp_gap", number(audit.socp_gap)},
          {"tolerance", audit.tolerance},
          {"pass", audit.pass}};
}

json config_json(const admm::SolverConfig& c) {
  json out = {
      {"rho", c.rho},
      {"rho_policy", c.rho_policy == admm::RhoPolicy::kAdaptive ? "adaptive" : "fixed"},
      {"eps_primal", c.eps_primal},
      {"eps_dual", c.eps_dual},
      {"socp_gap_tol", c.socp_gap_tol},
      {"max_iters", c.max_iters},
      {"init", c.init_policy == admm::InitPolicy::kRandom ? "random" : "zeros"},
      {"seed", c.seed},
      {"fixed_pc", c.fixed_pc.has_value()},
      {"force_qw_zero", c.force_qw_zero}};
  return out;
}

json metrics_json(const baseline::PolicyMetrics& m) {
  json dev = json::array();
  for (double d : m.scenario_max_deviation) dev.push_back(number(d));
  return {{"expected_losses_mw", number(m.expected_losses_mw)},
          {"max_deviation", number(m.max_deviation)},
          {"scenario_max_deviation", dev},
          {"evaluated", m.evaluated},
          {"failed", m.failed}};
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::string network_to_json(const network::Network& net) {
  const auto& b = net.bases();
  json nodes = json::array();
  json lines = json::array();
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    const auto& p = net.node_params(static_cast<int>(i));
    json n = {{"id", p.id},
              {"ancestor", p.ancestor ? json(*p.ancestor) : json(nullptr)},
              {"p_l_mw", p.p_load_mw},
              {"q_l_mvar", p.q_load_mvar},
              {"pf", p.power_factor},
              {"pc_min_mw", p.pc_min_mw},
              {"pc_max_mw", p.pc_max_mw},
              {"s_w_mva", p.pv_capacity_mva},
              {"q_s", p.shunt_q},
              {"k_u", p.utility_weight}};
    nodes.push_back(std::move(n));
    if (i == 0) continue;
    const auto& l = net.line_params(static_cast<int>(i));
    lines.push_back(
        {{"node", l.node}, {"r_ohm", l.r_ohm}, {"x_ohm", l.x_ohm}, {"l_max_ka2", l.l_max_ka2}});
  }
  json out = {{"v0_kv", b.v0_kv},
              {"s_base_mva", b.s_base_mva},
              {"epsilon", b.epsilon},
              {"nodes", nodes},
              {"lines", lines}};
  return dump(out);
}

network::Network network_from_json(const std::string& text) {
  const json j = parse(text, "network");
  network::Bases bases;
  bases.v0_kv = field<double>(j, "v0_kv", "network");
  bases.s_base_mva = field<double>(j, "s_base_mva", "network");
  bases.epsilon = field<double>(j, "epsilon", "network");

  std::vector<network::NodeParams> nodes;
  for (const auto& n : field<json>(j, "nodes", "network")) {
    network::NodeParams p;
    p.id = field<int>(n, "id", "node");
    const std::string where = "node " + std::to_string(p.id);
    if (auto it = n.find("ancestor"); it != n.end() && !it->is_null())
      p.ancestor = it->get<int>();
    p.p_load_mw = field<double>(n, "p_l_mw", where);
    p.q_load_mvar = field<double>(n, "q_l_mvar", where);
    p.power_factor = field<double>(n, "pf", where);
    p.pc_min_mw = field_or<double>(n, "pc_min_mw", 0.0);
    p.pc_max_mw = field<double>(n, "pc_max_mw", where);
    p.pv_capacity_mva = field<double>(n, "s_w_mva", where);
    p.shunt_q = field_or<double>(n, "q_s", 0.0);
    p.utility_weight = field<double>(n, "k_u", where);
    nodes.push_back(p);
  }
  std::vector<network::LineParams> lines;
  for (const auto& l : field<json>(j, "lines", "network")) {
    network::LineParams p;
    p.node = field<int>(l, "node", "line");
    const std::string where = "line " + std::to_string(p.node);
    p.r_ohm = field<double>(l, "r_ohm", where);
    p.x_ohm = field<double>(l, "x_ohm", where);
    p.l_max_ka2 = field<double>(l, "l_max_ka2", where);
    lines.push_back(p);
  }
  return network::Network::build(std::move(nodes), std::move(lines), bases);
}

std::string scenarios_to_json(const scenario::ScenarioSet& set) {
  json scen = json::array();
  for (const auto& s : set.scenarios)
    scen.push_back({{"pi", s.probability}, {"w_mw", node_map(s.w_mw, 1, 1.0)}});
  json out = {{"seed", set.seed}, {"scenarios", scen}};
  if (!set.source_index.empty()) out["source_index"] = set.source_index;
  return dump(out);
}

scenario::ScenarioSet scenarios_from_json(const std::string& text, std::size_t node_count) {
  const json j = parse(text, "scenarios");
  scenario::ScenarioSet set;
  set.seed = field_or<std::uint64_t>(j, "seed", 0);
  const auto list = field<json>(j, "scenarios", "scenario set");
  for (std::size_t m = 0; m < list.size(); ++m) {
    const std::string where = "scenario " + std::to_string(m);
    scenario::Scenario s;
    s.probability = field<double>(list[m], "pi", where);
    s.w_mw = read_node_map(field<json>(list[m], "w_mw", where), node_count, 1.0, where);
    set.scenarios.push_back(std::move(s));
  }
  set.source_index = field_or<std::vector<std::size_t>>(j, "source_index", {});
  scenario::validate(set);
  return set;
}

std::string solution_to_json(const program::StochasticProgram& program,
                             const program::Solution& sol) {
  return dump(solution_json(program, sol));
}

program::Solution solution_from_json(const program::StochasticProgram& program,
                                     const std::string& text) {
  const json j = parse(text, "solution");
  const auto& pu = program.network().per_unit();
  const double s = pu.s_base_mva;
  const double v2 = pu.v_base_kv * pu.v_base_kv;
  const double i2 = pu.current_base() * pu.current_base();
  const std::size_t n = program.node_count();
  program::Solution sol;
  sol.pc = read_node_map(field<json>(j, "pc_mw", "solution"), n, s, "pc_mw");
  for (const auto& b : field<json>(j, "scenarios", "solution")) {
    program::ScenarioFlows f;
    f.P = read_node_map(field<json>(b, "P_mw", "solution"), n, s, "P_mw");
    f.Q = read_node_map(field<json>(b, "Q_mvar", "solution"), n, s, "Q_mvar");
    f.v = read_node_map(field<json>(b, "v_kv2", "solution"), n, v2, "v_kv2");
    f.l = read_node_map(field<json>(b, "l_ka2", "solution"), n, i2, "l_ka2");
    f.qw = read_node_map(field<json>(b, "qw_mvar", "solution"), n, s, "qw_mvar");
    f.p0_plus = field<double>(b, "p0_plus_mw", "solution") / s;
    f.p0_minus = field<double>(b, "p0_minus_mw", "solution") / s;
    sol.scenarios.push_back(std::move(f));
  }
  return sol;
}

std::vector<double> pc_from_json(const network::Network& net, const std::string& text) {
  const json j = parse(text, "pc");
  const json* src = &j;
  if (auto it = j.find("solution"); it != j.end()) src = &*it;
  return read_node_map(field<json>(*src, "pc_mw", "pc"), net.node_count(),
                       net.per_unit().s_base_mva, "pc_mw");
}

std::string audit_to_json(const program::AuditReport& audit) { return dump(audit_json(audit)); }

std::string config_to_json(const admm::SolverConfig& config) {
  return dump(config_json(config));
}

std::string report_to_json(const program::StochasticProgram& program,
                           const admm::SolverConfig& config, const admm::SolveReport& report) {
  const auto obj = program::objective_breakdown(program, report.solution);
  const auto audit = program::feasibility_audit(program, report.solution, 1e-4);
  const double s = program.network().per_unit().s_base_mva;
  json out;
  out["config"] = config_json(config);
  out["converged"] = report.converged;
  out["iterations"] = report.iterations;
  out["final_r"] = number(report.final_r);
  out["final_s"] = number(report.final_s);
  out["final_gap"] = number(report.final_gap);
  out["final_rho"] = number(report.final_rho);
  out["objective"] = {{"negative_utility", number(obj.negative_utility)},
                      {"expected_cost", number(obj.expected_cost)},
                      {"expected_losses_mw", number(obj.expected_losses_mw)},
                      {"loss_term", number(obj.loss_term)},
                      {"total", number(obj.total)}};
  out["audit"] = audit_json(audit);
  out["complementarity_mw"] = number(program::complementarity_check(report.solution) * s);
  out["solution"] = solution_json(program, report.solution);
  return dump(out);
}

std::string times_to_json(const admm::PhaseTimes& t, double wall_seconds) {
  json out = {{"x_seconds", t.x_seconds},
              {"z_seconds", t.z_seconds},
              {"multiplier_seconds", t.multiplier_seconds},
              {"residual_seconds", t.residual_seconds},
              {"wall_seconds", wall_seconds}};
  return dump(out);
}

std::string trace_to_csv(const admm::Trace& trace) {
  std::string out = "iter,r,s,objective,gap,rho\n";
  for (std::size_t k = 0; k < trace.r.size(); ++k) {
    out += std::to_string(k + 1);
    for (double v : {trace.r[k], trace.s[k], trace.objective[k], trace.gap[k], trace.rho[k]}) {
      out += ',';
      out += csv_number(v);
    }
    out += '\n';
  }
  return out;
}

std::string verdict_to_json(const exactness::ExactnessVerdict& v) {
  json scen = json::array();
  for (bool b : v.scenario_pass) scen.push_back(b);
  json out = {{"scenario_pass", scen},
              {"all_scenarios_pass", v.all_scenarios_pass},
              {"m_independent_pass", v.m_independent_pass},
              {"min_component", number(v.min_component)},
              {"m_independent_min_component", number(v.m_independent_min_component)},
              {"tolerance", v.tolerance},
              {"notes", v.notes}};
  if (v.has_windows)
    out["worst"] = {{"path", v.worst.path},
                    {"t", v.worst.t},
                    {"s", v.worst.s},
                    {"value", number(v.worst.value)}};
  else
    out["worst"] = nullptr;
  return dump(out);
}

std::string metrics_to_json(const baseline::PolicyMetrics& metrics) {
  return dump(metrics_json(metrics));
}

std::string cdf_to_csv(std::span<const baseline::CdfPoint> cdf) {
  std::string out = "deviation,cumulative_probability\n";
  for (const auto& p : cdf) out += csv_number(p.deviation) + "," + csv_number(p.probability) + "\n";
  return out;
}

std::string online_to_json(const program::StochasticProgram& program,
                           const baseline::OnlineResult& result) {
  json outcomes = json::array();
  for (const auto& o : result.outcomes)
    outcomes.push_back({{"converged", o.converged},
                        {"feasible", o.feasible},
                        {"iterations", o.iterations},
                        {"final_r", number(o.final_r)},
                        {"final_s", number(o.final_s)},
                        {"final_gap", number(o.final_gap)},
                        {"audit_worst", number(o.audit_worst)}});
  const auto metrics = baseline::solution_metrics(program, result.solution);
  json out = {{"infeasible", result.infeasible},
              {"infeasible_rule",
               "not converged within max_iters, or feasibility audit fails at 1e-4"},
              {"outcomes", outcomes},
              {"metrics", metrics_json(metrics)},
              {"solution", solution_json(program, result.solution)}};
  return dump(out);
}

}  // namespace dsopf::io

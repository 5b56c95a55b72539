/*
 *  Copyright 2026 The workcap Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

// workcap command-line front end.
//
// Exit codes: 0 success, 1 verification or computation failure, 2 input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "workcap/agents.hpp"
#include "workcap/bayesnet.hpp"
#include "workcap/capacity.hpp"
#include "workcap/errors.hpp"
#include "workcap/loop.hpp"
#include "workcap/markov.hpp"
#include "workcap/model_io.hpp"
#include "workcap/verification.hpp"

using json = nlohmann::ordered_json;
using namespace workcap;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInputError = 2;

struct RunConfig {
  std::string units = "bits";
  double tol = 1e-9;
  std::size_t horizon = 4;
  std::uint64_t seed = 0;
  std::size_t memory_size = 2;
  std::size_t restarts = 32;
  std::string json_out;
  std::string out;

  LogBase base() const { return units == "nats" ? LogBase::nats : LogBase::bits; }
};

// Rounds to 12 significant digits so the JSON writer prints at most that.
double r12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void emit_json(const RunConfig& cfg, const json& report) {
  if (cfg.json_out.empty()) return;
  const std::string text = report.dump(2) + "\n";
  if (cfg.json_out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.json_out, std::ios::binary);
  if (!f) throw ParseError("cannot write " + cfg.json_out);
  f << text;
}

// With `--json -` the JSON report replaces the human-readable output.
std::ostream& human(const RunConfig& cfg) {
  static std::ostringstream sink;
  return cfg.json_out == "-" ? sink : std::cout;
}

// ---------------------------------------------------------------------------

int cmd_analyze(const RunConfig& cfg, const std::string& env_file, const std::string& agent_file) {
  const auto env = load_environment(env_file);
  const auto mem = is_memoryless_invariant(env);
  const auto uni = is_unifilar(env);
  const bool product = is_product(env, cfg.horizon);
  std::ostream& out = human(cfg);
  json report;
  report["alphabet"] = env.alphabet;
  report["hidden_states"] = env.hidden_states;
  report["noiseless"] = is_noiseless(env);
  report["memoryless_invariant"] = mem.has_value();
  report["unifilar"] = uni.has_value();
  report["product"] = product;
  report["product_horizon"] = cfg.horizon;

  out << "alphabet: " << env.n_symbols() << " symbols; hidden states: " << env.n_hidden() << "\n";
  out << "noiseless: " << yes_no(is_noiseless(env)) << "\n";
  const std::string cert = "(horizon-" + std::to_string(cfg.horizon) + " certificate)";
  out << "memoryless invariant: " << yes_no(mem.has_value()) << "; ";
  if (product)
    out << "product: yes " << cert << "; unifilar: " << yes_no(uni.has_value()) << "\n";
  else
    out << "unifilar: " << yes_no(uni.has_value()) << "; product: no\n";

  if (uni) {
    const auto reach = reachable_hidden_states(env);
    json map = json::array();
    out << "unifilarity map z' = f(a, z, s):\n";
    for (std::size_t z = 0; z < env.n_hidden(); ++z) {
      if (!reach[z]) continue;
      for (std::size_t a = 0; a < env.n_symbols(); ++a)
        for (std::size_t s = 0; s < env.n_symbols(); ++s) {
          if (env.emission(s, a, z) <= 0.0) continue;
          const std::size_t zn = (*uni)(a, z, s);
          out << "  f(" << env.alphabet[a] << ", " << env.hidden_states[z] << ", " << env.alphabet[s]
              << ") = " << env.hidden_states[zn] << "\n";
          map.push_back({{"action", env.alphabet[a]},
                         {"state", env.hidden_states[z]},
                         {"percept", env.alphabet[s]},
                         {"next", env.hidden_states[zn]}});
        }
    }
    report["unifilarity_map"] = map;
  }

  if (!agent_file.empty()) {
    const PerceptActionLoop loop(load_agent(agent_file), env);
    const auto chain = build_global_chain(loop);
    const auto sub = reachable_subchain(chain);
    const auto cls = classify_states(sub.kernel);
    const auto prof = asymptotic_profile(sub.kernel, 1e-10);
    std::size_t n_recurrent = 0;
    for (std::size_t c = 0; c < cls.classes.size(); ++c)
      if (cls.recurrent[cls.classes[c][0]]) ++n_recurrent;
    const auto limit = propagate(sub.initial, prof.cesaro);
    double top = 0.0;
    std::size_t top_state = 0;
    for (std::size_t i = 0; i < limit.size(); ++i)
      if (limit[i] > top) top = limit[i], top_state = i;
    const std::size_t u = sub.states[top_state];
    const std::size_t z = u % chain.n_hidden, s = u / chain.n_hidden % chain.n_symbols;
    const std::size_t a = u / (chain.n_hidden * chain.n_symbols) % chain.n_symbols;
    const std::size_t m = u / (chain.n_hidden * chain.n_symbols * chain.n_symbols);
    const std::string top_label = "(m=" + loop.agent.memory_states[m] + ", a=" + env.alphabet[a] +
                                  ", s=" + env.alphabet[s] + ", z=" + env.hidden_states[z] + ")";
    out << "global chain: " << chain.size() << " states, " << sub.states.size() << " reachable\n";
    out << "period: " << prof.period_lcm << "; recurrent classes: " << n_recurrent << " of "
        << cls.classes.size() << "\n";
    out << "Cesaro limit: heaviest state " << top_label << " with " << fixed6(top)
        << "; residual " << prof.residual << "\n";
    report["global_chain"] = {{"states", chain.size()},
                              {"reachable", sub.states.size()},
                              {"period", prof.period_lcm},
                              {"classes", cls.classes.size()},
                              {"recurrent_classes", n_recurrent},
                              {"cesaro_max_state", top_label},
                              {"cesaro_max_mass", r12(top)},
                              {"residual", r12(prof.residual)}};
  }
  emit_json(cfg, report);
  return kOk;
}

int cmd_work_rate(const RunConfig& cfg, const std::string& env_file, const std::string& agent_file) {
  const PerceptActionLoop loop(load_agent(agent_file), load_environment(env_file));
  const auto rep = work_rate(loop, cfg.horizon, std::min(cfg.tol, 1e-10));
  const LogBase b = cfg.base();
  std::ostream& out = human(cfg);
  json report;
  json rounds = json::array();
  for (std::size_t t = 0; t < rep.per_round.size(); ++t) {
    out << "W_" << t << " = " << fixed6(from_nats(rep.per_round[t], b)) << " " << unit_name(b) << "\n";
    rounds.push_back(r12(from_nats(rep.per_round[t], b)));
  }
  out << "rate: " << fixed6(from_nats(rep.rate, b)) << " " << unit_name(b) << " per round\n";
  out << "period used: " << rep.period_used << "; residual: " << rep.residual << "\n";
  report["units"] = unit_name(b);
  report["per_round"] = rounds;
  report["rate"] = r12(from_nats(rep.rate, b));
  report["period_used"] = rep.period_used;
  report["residual"] = r12(rep.residual);
  emit_json(cfg, report);
  return kOk;
}

int cmd_capacity(const RunConfig& cfg, const std::string& env_file) {
  const auto env = load_environment(env_file);
  LowerBoundOptions opts;
  opts.memory_size = cfg.memory_size;
  opts.restarts = cfg.restarts;
  opts.seed = cfg.seed;
  opts.tol = cfg.tol;
  const auto res = capacity(env, opts);
  const LogBase b = cfg.base();
  std::ostream& out = human(cfg);
  json report;
  out << fixed6(res.value_in(b)) << " " << unit_name(b) << " (" << method_name(res.method) << ")";
  if (res.action_distribution) out << ", witness p(" << env.alphabet[0] << ")=" << fixed6((*res.action_distribution)[0]);
  out << "\n";
  if (res.witness) out << "witness agent: " << res.witness->n_memory() << " memory state(s)\n";
  if (res.method == CapacityMethod::numeric_lower_bound) {
    out << "lower bound from " << res.trace.size() << " restarts, memory size " << res.memory_size
        << (res.stalled ? "; some restarts hit the evaluation limit" : "") << "\n";
  }
  report["units"] = unit_name(b);
  report["value"] = r12(res.value_in(b));
  report["method"] = method_name(res.method);
  if (res.action_distribution) {
    json p = json::array();
    for (double x : *res.action_distribution) p.push_back(r12(x));
    report["action_distribution"] = p;
  }
  if (res.witness) report["witness_memory_states"] = res.witness->n_memory();
  report["stalled"] = res.stalled;
  if (res.cross_check_gap) report["cross_check_gap"] = r12(*res.cross_check_gap);
  if (!cfg.out.empty() && res.witness) {
    save(*res.witness, cfg.out);
    out << "witness written to " << cfg.out << "\n";
  }
  emit_json(cfg, report);
  return kOk;
}

int cmd_build_agent(const RunConfig& cfg, const std::string& kind, const std::string& env_file,
                    const std::string& base_file, const std::vector<double>& probs) {
  const auto env = load_environment(env_file);
  const auto& alphabet = env.alphabet;
  auto distribution = [&]() -> Distribution {
    if (probs.empty()) return Distribution(alphabet.size(), 1.0 / static_cast<double>(alphabet.size()));
    if (probs.size() != alphabet.size())
      throw ArgumentError("--probs needs " + std::to_string(alphabet.size()) + " entries");
    check_distribution(probs, 1e-9);
    return probs;
  };
  std::optional<AgentModel> agent;
  if (kind == "identity")
    agent = build_identity(alphabet);
  else if (kind == "uniform")
    agent = build_uniform(alphabet);
  else if (kind == "memoryless")
    agent = build_memoryless(alphabet, distribution());
  else if (kind == "last-action")
    agent = build_last_action(alphabet, distribution());
  else if (kind == "predictive")
    agent = build_predictive(base_file.empty() ? build_uniform(alphabet) : load_agent(base_file), env);
  else
    throw ArgumentError("unknown agent kind " + kind);

  std::ostream& out = human(cfg);
  if (cfg.out.empty())
    std::cout << to_json(*agent);
  else
    save(*agent, cfg.out);
  if (!cfg.out.empty()) out << kind << " agent with " << agent->n_memory() << " memory state(s) written to " << cfg.out << "\n";
  emit_json(cfg, {{"kind", kind}, {"memory_states", agent->n_memory()}, {"out", cfg.out}});
  return kOk;
}

int cmd_dsep(const RunConfig& cfg, const std::string& variant_name_, const std::string& a, const std::string& b,
             const std::string& c, const std::string& env_file, const std::string& agent_file, std::size_t n_triples) {
  const LoopVariant variant = parse_variant(variant_name_);
  const Dag dag = build_loop_dag(cfg.horizon, variant);
  std::ostream& out = human(cfg);
  json report;
  report["variant"] = variant_name(variant);
  report["horizon"] = cfg.horizon;
  int code = kOk;
  if (!a.empty() || !b.empty()) {
    const auto A = split_names(a), B = split_names(b), C = split_names(c);
    if (A.empty() || B.empty()) throw ArgumentError("--a and --b must both name at least one node");
    const bool sep = d_separated(dag, A, B, C);
    out << "{" << a << "} _||_ {" << b << "} | {" << c << "}: " << (sep ? "d-separated" : "d-connected") << "\n";
    report["d_separated"] = sep;
    if (!env_file.empty() && !agent_file.empty()) {
      const PerceptActionLoop loop(load_agent(agent_file), load_environment(env_file));
      const auto traj = trajectory_distribution(loop, cfg.horizon);
      const double cmi = conditional_mutual_information(traj.joint, A, B, C);
      out << "conditional mutual information: " << from_nats(cmi, cfg.base()) << " " << unit_name(cfg.base()) << "\n";
      report["cmi"] = r12(from_nats(cmi, cfg.base()));
    }
  } else if (!env_file.empty() && !agent_file.empty()) {
    const PerceptActionLoop loop(load_agent(agent_file), load_environment(env_file));
    const auto rep = validate_compatibility(loop, variant, cfg.horizon, n_triples, cfg.seed);
    out << rep.tested << " separated triples, " << rep.violations.size() << " violations, max CMI "
        << from_nats(rep.max_cmi, cfg.base()) << " " << unit_name(cfg.base()) << "\n";
    report["tested"] = rep.tested;
    report["violations"] = rep.violations.size();
    report["max_cmi"] = r12(from_nats(rep.max_cmi, cfg.base()));
    if (!rep.violations.empty()) code = kFailure;
  } else {
    for (const auto& [u, v] : dag.edges()) out << u << " -> " << v << "\n";
    json edges = json::array();
    for (const auto& [u, v] : dag.edges()) edges.push_back({u, v});
    report["edges"] = edges;
  }
  emit_json(cfg, report);
  return code;
}

int cmd_verify(const RunConfig& cfg, const std::string& models_dir) {
  VerifyConfig vc;
  vc.tol = cfg.tol;
  vc.units = cfg.base();
  vc.seed = cfg.seed;
  if (!models_dir.empty()) vc.models_dir = models_dir;
  std::ostream& out = human(cfg);
  json report;
  json rows = json::array();
  bool all = true;
  for (const auto& r : run_acceptance(vc)) {
    out << format_result(r) << "\n" << std::flush;
    all = all && r.passed;
    rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  out << (all ? "all criteria passed" : "some criteria failed") << "\n";
  report["units"] = unit_name(vc.units);
  report["tol"] = vc.tol;
  report["seed"] = vc.seed;
  report["criteria"] = rows;
  report["passed"] = all;
  emit_json(cfg, report);
  return all ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workcap: work extraction and work capacity of percept-action loops"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--units", cfg.units, "bits or nats")->check(CLI::IsMember({"bits", "nats"}));
    sub->add_option("--tol", cfg.tol, "numerical tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--horizon", cfg.horizon, "finite horizon / number of rounds")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--json", cfg.json_out, "write a JSON report to this file ('-' for stdout)");
  };

  std::string env_file, agent_file, kind, base_file, variant = "general", set_a, set_b, set_c, models_dir;
  std::vector<double> probs;
  std::size_t n_triples = 200;

  auto* analyze = app.add_subcommand("analyze", "channel-class predicates of an environment");
  common(analyze);
  analyze->add_option("env", env_file, "environment model")->required();
  analyze->add_option("--agent", agent_file, "agent model for global-chain analysis");

  auto* wr = app.add_subcommand("work-rate", "per-round work and asymptotic work rate of a loop");
  common(wr);
  wr->add_option("env", env_file, "environment model")->required();
  wr->add_option("agent", agent_file, "agent model")->required();

  auto* cap = app.add_subcommand("capacity", "work capacity of an environment");
  common(cap);
  cap->add_option("env", env_file, "environment model")->required();
  cap->add_option("--memory-size", cfg.memory_size, "agent memory size for the numeric bound")
      ->check(CLI::PositiveNumber);
  cap->add_option("--restarts", cfg.restarts, "optimizer restarts for the numeric bound")->check(CLI::PositiveNumber);
  cap->add_option("--out", cfg.out, "write the witness agent to this file");

  auto* build = app.add_subcommand("build-agent", "construct an agent model");
  common(build);
  build->add_option("kind", kind, "identity, uniform, memoryless, last-action or predictive")
      ->required()
      ->check(CLI::IsMember({"identity", "uniform", "memoryless", "last-action", "predictive"}));
  build->add_option("env", env_file, "environment model (alphabet; hidden states for predictive)")->required();
  build->add_option("--probs", probs, "action distribution for memoryless and last-action")->delimiter(',');
  build->add_option("--base", base_file, "base agent for predictive (default uniform)");
  build->add_option("--out", cfg.out, "output file (default stdout)");

  auto* dsep = app.add_subcommand("dsep", "d-separation queries on loop networks");
  common(dsep);
  dsep->add_option("--variant", variant, "general, memoryless or product");
  dsep->add_option("--a", set_a, "comma-separated node names");
  dsep->add_option("--b", set_b, "comma-separated node names");
  dsep->add_option("--c", set_c, "comma-separated conditioning nodes");
  dsep->add_option("--env", env_file, "environment model for CMI checks");
  dsep->add_option("--agent", agent_file, "agent model for CMI checks");
  dsep->add_option("--triples", n_triples, "number of sampled triples to validate");

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  common(verify);
  verify->add_option("--models-dir", models_dir, "directory with the bundled models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*analyze) return cmd_analyze(cfg, env_file, agent_file);
    if (*wr) return cmd_work_rate(cfg, env_file, agent_file);
    if (*cap) return cmd_capacity(cfg, env_file);
    if (*build) return cmd_build_agent(cfg, kind, env_file, base_file, probs);
    if (*dsep) return cmd_dsep(cfg, variant, set_a, set_b, set_c, env_file, agent_file, n_triples);
    if (*verify) return cmd_verify(cfg, models_dir);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ClassError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kInputError;
}

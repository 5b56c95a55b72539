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

#include "workcap/bayesnet.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>

#include "workcap/errors.hpp"
#include "workcap/info.hpp"

namespace workcap {

std::size_t Dag::add_node(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  const std::size_t id = names_.size();
  names_.push_back(name);
  index_[name] = id;
  parents_.emplace_back();
  children_.emplace_back();
  return id;
}

std::size_t Dag::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw KeyError("unknown node " + name);
  return it->second;
}

bool Dag::reaches(std::size_t from, std::size_t to) const {
  std::vector<bool> seen(size(), false);
  std::deque<std::size_t> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    if (v == to) return true;
    for (std::size_t c : children_[v])
      if (!seen[c]) {
        seen[c] = true;
        queue.push_back(c);
      }
  }
  return false;
}

void Dag::add_edge(const std::string& from, const std::string& to) {
  const std::size_t u = index_of(from), v = index_of(to);
  if (has_edge(from, to)) return;
  if (u == v || reaches(v, u)) throw ArgumentError("edge " + from + " -> " + to + " closes a cycle");
  children_[u].push_back(v);
  parents_[v].push_back(u);
}

bool Dag::has_edge(const std::string& from, const std::string& to) const {
  const std::size_t u = index_of(from), v = index_of(to);
  return std::find(children_[u].begin(), children_[u].end(), v) != children_[u].end();
}

std::vector<std::pair<std::string, std::string>> Dag::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t u = 0; u < size(); ++u)
    for (std::size_t v : children_[u]) out.emplace_back(names_[u], names_[v]);
  return out;
}

const char* variant_name(LoopVariant v) noexcept {
  switch (v) {
    case LoopVariant::general:
      return "general";
    case LoopVariant::memoryless_env:
      return "memoryless_env";
    case LoopVariant::product_env:
      return "product_env";
  }
  return "unknown";
}

LoopVariant parse_variant(const std::string& name) {
  if (name == "general") return LoopVariant::general;
  if (name == "memoryless" || name == "memoryless_env") return LoopVariant::memoryless_env;
  if (name == "product" || name == "product_env") return LoopVariant::product_env;
  throw ArgumentError("unknown network variant " + name);
}

Dag build_loop_dag(std::size_t horizon, LoopVariant variant) {
  if (horizon == 0) throw ArgumentError("build_loop_dag: horizon must be at least 1");
  auto V = [](std::size_t t) { return "V" + std::to_string(t); };
  auto W = [](std::size_t t) { return "W" + std::to_string(t); };
  Dag g;
  const bool memoryless = variant == LoopVariant::memoryless_env;
  for (std::size_t t = 0; t < horizon; ++t) {
    g.add_node(V(t));
    g.add_node(var_m(t));
    g.add_node(var_a(t));
    if (!memoryless) {
      g.add_node(var_z(t));
      g.add_node(W(t));
    }
    g.add_node(var_s(t));
  }
  for (std::size_t t = 0; t < horizon; ++t) {
    g.add_edge(V(t), var_m(t));
    g.add_edge(V(t), var_a(t));
    if (t + 1 < horizon) {
      g.add_edge(var_s(t), V(t + 1));
      g.add_edge(var_m(t), V(t + 1));
    }
    if (memoryless) {
      g.add_edge(var_a(t), var_s(t));
      continue;
    }
    if (variant == LoopVariant::general) g.add_edge(var_a(t), W(t));
    g.add_edge(var_z(t), W(t));
    g.add_edge(W(t), var_s(t));
    if (t + 1 < horizon) g.add_edge(W(t), var_z(t + 1));
  }
  return g;
}

bool d_separated(const Dag& dag, const std::vector<std::string>& a, const std::vector<std::string>& b,
                 const std::vector<std::string>& c) {
  const std::size_t n = dag.size();
  std::vector<int> role(n, 0);  // 1 = a, 2 = b, 3 = c
  auto mark = [&](const std::vector<std::string>& set, int r) {
    for (const auto& name : set) {
      const std::size_t v = dag.index_of(name);
      if (role[v] != 0) throw ArgumentError("node " + name + " appears in more than one set");
      role[v] = r;
    }
  };
  mark(a, 1);
  mark(b, 2);
  mark(c, 3);

  // Nodes with a descendant in c (including c itself) open colliders.
  std::vector<bool> anc(n, false);
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v)
    if (role[v] == 3) {
      anc[v] = true;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t p : dag.parents(v))
      if (!anc[p]) {
        anc[p] = true;
        queue.push_back(p);
      }
  }

  // Traversal over (node, arrived-from-child) pairs.
  std::vector<bool> seen_up(n, false), seen_down(n, false);
  std::deque<std::pair<std::size_t, bool>> frontier;
  for (std::size_t v = 0; v < n; ++v)
    if (role[v] == 1) frontier.emplace_back(v, true);
  while (!frontier.empty()) {
    const auto [v, up] = frontier.front();
    frontier.pop_front();
    auto& seen = up ? seen_up : seen_down;
    if (seen[v]) continue;
    seen[v] = true;
    const bool in_c = role[v] == 3;
    if (!in_c && role[v] == 2) return false;
    if (up && !in_c) {
      for (std::size_t p : dag.parents(v)) frontier.emplace_back(p, true);
      for (std::size_t ch : dag.children(v)) frontier.emplace_back(ch, false);
    } else if (!up) {
      if (!in_c)
        for (std::size_t ch : dag.children(v)) frontier.emplace_back(ch, false);
      if (anc[v])
        for (std::size_t p : dag.parents(v)) frontier.emplace_back(p, true);
    }
  }
  return true;
}

std::vector<std::string> observable_nodes(const Dag& dag) {
  std::vector<std::string> out;
  for (const auto& n : dag.names())
    if (n[0] != 'V' && n[0] != 'W') out.push_back(n);
  return out;
}

CompatibilityReport validate_compatibility(const PerceptActionLoop& loop, LoopVariant variant, std::size_t horizon,
                                           std::size_t n_triples, std::uint64_t seed) {
  const Dag dag = build_loop_dag(horizon, variant);
  const auto traj = trajectory_distribution(loop, horizon);
  auto nodes = observable_nodes(dag);
  std::mt19937_64 rng(seed);
  CompatibilityReport rep;
  std::set<std::vector<std::vector<std::string>>> used;
  const std::size_t max_attempts = 1000 * std::max<std::size_t>(n_triples, 1);
  for (std::size_t attempt = 0; attempt < max_attempts && rep.tested < n_triples; ++attempt) {
    std::shuffle(nodes.begin(), nodes.end(), rng);
    const std::size_t na = 1 + rng() % 2, nb = 1 + rng() % 2, nc = rng() % 4;
    if (na + nb + nc > nodes.size()) continue;
    std::vector<std::string> a(nodes.begin(), nodes.begin() + na);
    std::vector<std::string> b(nodes.begin() + na, nodes.begin() + na + nb);
    std::vector<std::string> c(nodes.begin() + na + nb, nodes.begin() + na + nb + nc);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::sort(c.begin(), c.end());
    if (b < a) std::swap(a, b);
    if (!used.insert({a, b, c}).second) continue;
    if (!d_separated(dag, a, b, c)) continue;
    const double cmi = conditional_mutual_information(traj.joint, a, b, c);
    ++rep.tested;
    rep.max_cmi = std::max(rep.max_cmi, cmi);
    if (cmi >= 1e-9) rep.violations.push_back({a, b, c, cmi});
  }
  return rep;
}

}  // namespace workcap

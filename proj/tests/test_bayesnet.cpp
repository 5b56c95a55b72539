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

#include <doctest.h>

#include <algorithm>
#include <deque>
#include <set>

#include "workcap/bayesnet.hpp"
#include "workcap/errors.hpp"
#include "workcap/verification.hpp"

using namespace workcap;

namespace {

// Separation in the moral graph of the ancestral set of a, b and c.
bool moral_separated(const Dag& g, const std::vector<std::string>& a, const std::vector<std::string>& b,
                     const std::vector<std::string>& c) {
  const std::size_t n = g.size();
  std::vector<bool> keep(n, false);
  std::deque<std::size_t> q;
  for (const auto* set : {&a, &b, &c})
    for (const auto& name : *set) q.push_back(g.index_of(name));
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop_front();
    if (keep[v]) continue;
    keep[v] = true;
    for (std::size_t p : g.parents(v)) q.push_back(p);
  }
  std::vector<std::set<std::size_t>> adj(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    const auto& ps = g.parents(v);
    for (std::size_t p : ps) adj[v].insert(p), adj[p].insert(v);
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j) adj[ps[i]].insert(ps[j]), adj[ps[j]].insert(ps[i]);
  }
  std::vector<bool> blocked(n, false), seen(n, false);
  for (const auto& name : c) blocked[g.index_of(name)] = true;
  for (const auto& name : a) q.push_back(g.index_of(name));
  std::set<std::size_t> targets;
  for (const auto& name : b) targets.insert(g.index_of(name));
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop_front();
    if (seen[v] || blocked[v]) continue;
    seen[v] = true;
    if (targets.count(v)) return false;
    for (std::size_t u : adj[v]) q.push_back(u);
  }
  return true;
}

Dag random_dag(Rng& rng, std::size_t n) {
  Dag g;
  for (std::size_t i = 0; i < n; ++i) g.add_node("N" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng() % 3 == 0) g.add_edge("N" + std::to_string(i), "N" + std::to_string(j));
  return g;
}

}  // namespace

TEST_CASE("dag construction") {
  Dag g;
  g.add_node("X");
  g.add_node("Y");
  CHECK(g.add_node("X") == 0);
  g.add_edge("X", "Y");
  CHECK(g.has_edge("X", "Y"));
  CHECK_FALSE(g.has_edge("Y", "X"));
  CHECK_THROWS_AS(g.add_edge("Y", "X"), ArgumentError);
  CHECK_THROWS_AS(g.add_edge("X", "Q"), KeyError);
}

TEST_CASE("chain, fork and collider") {
  Dag g;
  for (const char* n : {"X", "Y", "Z", "C", "D"}) g.add_node(n);
  g.add_edge("X", "Y");
  g.add_edge("Y", "Z");
  g.add_edge("X", "C");
  g.add_edge("Z", "C");
  g.add_edge("C", "D");
  CHECK_FALSE(d_separated(g, {"X"}, {"Z"}, {}));
  CHECK(d_separated(g, {"X"}, {"Z"}, {"Y"}));
  // Conditioning on the collider or its descendant opens X -> C <- Z.
  CHECK_FALSE(d_separated(g, {"X"}, {"Z"}, {"Y", "C"}));
  CHECK_FALSE(d_separated(g, {"X"}, {"Z"}, {"Y", "D"}));
  CHECK(d_separated(g, {"Y"}, {"C"}, {"X", "Z"}));
  CHECK_THROWS_AS(d_separated(g, {"X"}, {"X"}, {}), ArgumentError);
  CHECK_THROWS_AS(d_separated(g, {"X"}, {"Q"}, {}), KeyError);
}

TEST_CASE("loop network templates") {
  const auto general = build_loop_dag(2, LoopVariant::general);
  CHECK(general.edges().size() == 13);
  CHECK(general.has_edge("A0", "W0"));
  CHECK(general.has_edge("W0", "Z1"));
  CHECK(general.has_edge("S0", "V1"));
  const auto product = build_loop_dag(2, LoopVariant::product_env);
  CHECK(product.edges().size() == 11);
  CHECK_FALSE(product.has_edge("A0", "W0"));
  const auto memoryless = build_loop_dag(2, LoopVariant::memoryless_env);
  CHECK(memoryless.edges().size() == 8);
  CHECK_FALSE(memoryless.has_node("Z0"));
  CHECK(memoryless.has_edge("A1", "S1"));
  CHECK_THROWS_AS(build_loop_dag(0, LoopVariant::general), ArgumentError);
  CHECK(parse_variant("product") == LoopVariant::product_env);
  CHECK_THROWS_AS(parse_variant("cyclic"), ArgumentError);
  const auto obs = observable_nodes(general);
  CHECK(std::find(obs.begin(), obs.end(), "V0") == obs.end());
  CHECK(std::find(obs.begin(), obs.end(), "Z1") != obs.end());
}

TEST_CASE("separations implied by the templates") {
  // The percept depends on the past only through the action and the hidden
  // state.
  const auto g = build_loop_dag(3, LoopVariant::general);
  CHECK(d_separated(g, {"S1"}, {"M0", "A0", "S0"}, {"A1", "Z1"}));
  // V1 is not observed, so M1 does not screen A1 off from S0.
  CHECK_FALSE(d_separated(g, {"A1"}, {"S0"}, {"M1"}));
  CHECK_FALSE(d_separated(g, {"A1"}, {"S0"}, {"M0", "A0"}));
  // In the product template percepts do not depend on actions.
  const auto p = build_loop_dag(3, LoopVariant::product_env);
  CHECK(d_separated(p, {"A0"}, {"S0", "Z0", "S1", "Z1"}, {}));
  CHECK_FALSE(d_separated(g, {"A0"}, {"S0"}, {}));
  // In the memoryless template S_t depends on the past only through A_t.
  const auto m = build_loop_dag(3, LoopVariant::memoryless_env);
  CHECK(d_separated(m, {"S1"}, {"M0", "S0", "A0", "M1"}, {"A1"}));
}

TEST_CASE("d-separation agrees with the moral-graph criterion") {
  Rng rng(71);
  std::size_t separated = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Dag g;
    if (trial < 30)
      g = build_loop_dag(2 + trial % 3, static_cast<LoopVariant>(trial % 3));
    else
      g = random_dag(rng, 8);
    auto names = g.names();
    for (int k = 0; k < 50; ++k) {
      std::shuffle(names.begin(), names.end(), rng);
      const std::size_t na = 1 + rng() % 2, nb = 1 + rng() % 2, nc = rng() % 4;
      if (na + nb + nc > names.size()) continue;
      const std::vector<std::string> a(names.begin(), names.begin() + na);
      const std::vector<std::string> b(names.begin() + na, names.begin() + na + nb);
      const std::vector<std::string> c(names.begin() + na + nb, names.begin() + na + nb + nc);
      const bool sep = d_separated(g, a, b, c);
      CHECK(sep == moral_separated(g, a, b, c));
      CHECK(sep == d_separated(g, b, a, c));
      separated += sep;
    }
  }
  CHECK(separated > 100);
}

TEST_CASE("sampled separations hold on random loops") {
  Rng rng(72);
  const std::pair<LoopVariant, RandomEnvKind> templates[] = {
      {LoopVariant::general, RandomEnvKind::general},
      {LoopVariant::memoryless_env, RandomEnvKind::memoryless},
      {LoopVariant::product_env, RandomEnvKind::product},
  };
  for (const auto& [variant, kind] : templates) {
    const PerceptActionLoop loop(random_agent(rng, 2, 2), random_environment(rng, 2, 2, kind));
    const auto rep = validate_compatibility(loop, variant, 3, 60, 7);
    CHECK(rep.tested == 60);
    CHECK(rep.violations.empty());
    CHECK(rep.max_cmi < 1e-9);
  }
}

TEST_CASE("the wrong template is caught") {
  // A general environment violates separations of the product template.
  Rng rng(73);
  const PerceptActionLoop loop(random_agent(rng, 2, 2), random_environment(rng, 2, 2, RandomEnvKind::general));
  const auto rep = validate_compatibility(loop, LoopVariant::product_env, 3, 200, 9);
  CHECK_FALSE(rep.violations.empty());
}

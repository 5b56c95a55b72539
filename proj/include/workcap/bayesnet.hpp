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

// Finite-horizon Bayesian networks of the percept-action loop and
// d-separation queries on them.
//
// Node names follow the trajectory tables: "M0", "A0", "S0", "Z0", plus the
// auxiliary pair nodes "V0" = (A0, M0) and "W0" = (S0, Z1).

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "workcap/loop.hpp"

namespace workcap {

class Dag {
 public:
  /// Adds a node if absent and returns its index.
  std::size_t add_node(const std::string& name);
  /// Throws KeyError for unknown names and ArgumentError if the edge would
  /// close a cycle.
  void add_edge(const std::string& from, const std::string& to);

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t index_of(const std::string& name) const;
  bool has_node(const std::string& name) const { return index_.count(name) != 0; }
  bool has_edge(const std::string& from, const std::string& to) const;
  const std::vector<std::size_t>& parents(std::size_t v) const { return parents_[v]; }
  const std::vector<std::size_t>& children(std::size_t v) const { return children_[v]; }
  std::vector<std::pair<std::string, std::string>> edges() const;

 private:
  bool reaches(std::size_t from, std::size_t to) const;

  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
};

enum class LoopVariant { general, memoryless_env, product_env };

const char* variant_name(LoopVariant v) noexcept;
/// Parses "general", "memoryless" / "memoryless_env", "product" / "product_env";
/// ArgumentError otherwise.
LoopVariant parse_variant(const std::string& name);

/// Network over rounds t < horizon.
///   general:    V_t -> M_t, V_t -> A_t, S_t -> V_{t+1}, M_t -> V_{t+1},
///               A_t -> W_t, Z_t -> W_t, W_t -> S_t, W_t -> Z_{t+1}
///   product:    as general without A_t -> W_t
///   memoryless: V_t -> M_t, V_t -> A_t, A_t -> S_t, S_t -> V_{t+1},
///               M_t -> V_{t+1}; no Z or W nodes
Dag build_loop_dag(std::size_t horizon, LoopVariant variant);

/// True iff every trail between a and b is blocked by c. Sets must be
/// disjoint; unknown nodes raise KeyError.
bool d_separated(const Dag& dag, const std::vector<std::string>& a, const std::vector<std::string>& b,
                 const std::vector<std::string>& c);

/// Names of the observable nodes (no V or W).
std::vector<std::string> observable_nodes(const Dag& dag);

struct TripleCheck {
  std::vector<std::string> a, b, c;
  /// Nats.
  double cmi = 0.0;
};

struct CompatibilityReport {
  std::size_t tested = 0;
  double max_cmi = 0.0;
  std::vector<TripleCheck> violations;
};

/// Samples `n_triples` d-separated triples of disjoint observable node sets
/// and evaluates their conditional mutual information on the exact
/// trajectory table. A triple is a violation when its CMI reaches 1e-9 nats.
CompatibilityReport validate_compatibility(const PerceptActionLoop& loop, LoopVariant variant, std::size_t horizon,
                                           std::size_t n_triples, std::uint64_t seed);

}  // namespace workcap

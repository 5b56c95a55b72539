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

// Work capacity: the largest time-averaged work rate an agent can reach
// against a given environment. Closed forms for noiseless, memoryless
// invariant and unifilar product environments; a bounded-memory numerical
// lower bound otherwise. Values are in nats.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "workcap/channels.hpp"
#include "workcap/info.hpp"
#include "workcap/loop.hpp"

namespace workcap {

enum class CapacityMethod {
  closed_form_noiseless,
  closed_form_memoryless,
  closed_form_unifilar_product,
  numeric_lower_bound,
};

const char* method_name(CapacityMethod m) noexcept;

struct TraceEntry {
  std::vector<double> iterate;
  double objective = 0.0;
  std::size_t evaluations = 0;
  bool stalled = false;
};

struct CapacityResult {
  /// Nats.
  double value = 0.0;
  CapacityMethod method = CapacityMethod::numeric_lower_bound;
  std::optional<AgentModel> witness;
  /// Action distribution of a memoryless witness.
  std::optional<Distribution> action_distribution;
  std::vector<TraceEntry> trace;
  /// Some start or restart hit its iteration cap before converging.
  bool stalled = false;
  /// Memory states of the witness search space (numeric method).
  std::size_t memory_size = 1;
  /// |value - independent 1-D solution| for two-symbol memoryless channels.
  std::optional<double> cross_check_gap;

  double value_in(LogBase base) const noexcept { return from_nats(value, base); }
};

/// Zero, witnessed by the identity agent. Throws ClassError unless noiseless.
CapacityResult capacity_noiseless(const EnvironmentModel& env);

/// max over p of H(A) - H(S) with S ~ p phi(s|a), by multi-start
/// exponentiated-gradient ascent on the simplex followed by a pairwise
/// pattern search. Throws ClassError unless memoryless invariant.
CapacityResult capacity_memoryless(const EnvironmentModel& env, double tol = 1e-12);

/// The same objective evaluated directly on a reduced kernel phi(s | a).
CapacityResult capacity_memoryless(const TransitionKernel& reduced, const std::vector<std::string>& alphabet,
                                   double tol = 1e-12);

/// ln |A| - h(S), witnessed by the predictive extension of the uniform agent.
/// Throws ClassError unless unifilar and product (horizon-4 certificate).
CapacityResult capacity_unifilar_product(const EnvironmentModel& env, const EntropyRateOptions& opts = {});

struct LowerBoundOptions {
  std::size_t memory_size = 2;
  std::size_t restarts = 32;
  std::uint64_t seed = 0;
  /// Stop a restart when the best objective improves by less than this over
  /// `window` iterations.
  double tol = 1e-9;
  std::size_t window = 50;
  std::size_t max_evaluations = 4000;
  /// Entries below this are zeroed in the final snapping pass.
  double snap_threshold = 1e-4;
  /// 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

/// Best work rate found over agents with `memory_size` memory states. Agent
/// kernels are parameterized row-wise by softmax of free coordinates and
/// searched with restarted Nelder-Mead. The best agent for memory_size - 1,
/// padded with unused memory states, is both a candidate and the first
/// starting point, so the bound never decreases with memory size.
CapacityResult capacity_lower_bound(const EnvironmentModel& env, const LowerBoundOptions& opts = {});

/// Number of free coordinates for an agent with M memory states.
std::size_t agent_coordinate_count(std::size_t n_symbols, std::size_t n_memory);

/// Softmax parameterization used by capacity_lower_bound: one block of A*M
/// coordinates per kernel row (s, m), then A*M for the initial distribution.
AgentModel agent_from_coordinates(const std::vector<std::string>& alphabet, std::size_t n_memory,
                                  const std::vector<double>& x);

/// Dispatch in priority order: noiseless, memoryless invariant, unifilar
/// product, numeric lower bound.
CapacityResult capacity(const EnvironmentModel& env, const LowerBoundOptions& opts = {});

/// 0 <= value <= ln |S| within tol.
bool check_capacity_bounds(const CapacityResult& result, const EnvironmentModel& env, double tol = 1e-9);

struct SubadditivityReport {
  double first = 0.0;
  double second = 0.0;
  double cascaded = 0.0;
  double slack = 1e-8;
  bool holds = false;
};

/// C(cascade(env1, env2)) <= C(env1) + C(env2) + slack with closed-form
/// memoryless capacities. Throws ClassError unless all three channels are
/// memoryless invariant.
SubadditivityReport check_subadditivity(const EnvironmentModel& env1, const EnvironmentModel& env2,
                                        double slack = 1e-8);

struct AgentClassification {
  bool in_mea = false;
  /// Time average of H(A_t | M_t), nats.
  double mea_estimate = 0.0;
  PredictivenessEstimate predictiveness;
  bool in_pred_estimate = false;
  WorkReport work;
  /// Present when a reference capacity was supplied.
  std::optional<bool> efficient;
};

AgentClassification classify_agent_sets(const EnvironmentModel& env, const AgentModel& agent, std::size_t horizon = 4,
                                        double tol = 1e-9, std::optional<double> reference_capacity = std::nullopt);

}  // namespace workcap

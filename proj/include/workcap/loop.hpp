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

// An agent coupled to an environment. The joint state of round t is
// U_t = (M_t, A_t, S_t, Z_t), where Z_t is the hidden state in which S_t is
// emitted. States are indexed ((m * A + a) * S + s) * Z + z.

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "workcap/channels.hpp"
#include "workcap/info.hpp"
#include "workcap/markov.hpp"

namespace workcap {

struct PerceptActionLoop {
  /// Throws DimensionError when the alphabets differ.
  PerceptActionLoop(AgentModel agent, EnvironmentModel env);

  AgentModel agent;
  EnvironmentModel env;
};

struct GlobalChain {
  std::size_t n_memory = 0;
  std::size_t n_symbols = 0;
  std::size_t n_hidden = 0;
  TransitionKernel kernel;
  Distribution initial;
  /// Rows whose conditioning state has zero emission probability; they hold
  /// a uniform placeholder.
  std::vector<bool> placeholder;
  /// States reachable from the initial distribution.
  std::vector<bool> reachable;

  std::size_t size() const noexcept { return n_memory * n_symbols * n_symbols * n_hidden; }
  std::size_t index(std::size_t m, std::size_t a, std::size_t s, std::size_t z) const noexcept {
    return ((m * n_symbols + a) * n_symbols + s) * n_hidden + z;
  }
};

GlobalChain build_global_chain(const PerceptActionLoop& loop);

/// Joint law of (M_0, A_0, S_0, Z_0, ..., M_{T-1}, A_{T-1}, S_{T-1}, Z_{T-1})
/// built directly from the agent and environment kernels. Variables are
/// named "M0", "A0", "S0", "Z0", "M1", ...
struct TrajectoryDistribution {
  std::size_t horizon;
  JointTable joint;
};

inline constexpr std::size_t kDefaultTrajectoryBudget = 10'000'000;

/// Throws ResourceError stating the required table size when it exceeds
/// `budget` entries.
TrajectoryDistribution trajectory_distribution(const PerceptActionLoop& loop, std::size_t horizon,
                                               std::size_t budget = kDefaultTrajectoryBudget);

/// Variable names for round t.
std::string var_m(std::size_t t);
std::string var_a(std::size_t t);
std::string var_s(std::size_t t);
std::string var_z(std::size_t t);

/// All values in nats.
struct WorkReport {
  /// W_t = H(A_t | M_t) - H(S_t | M_t) for t < rounds.
  std::vector<double> per_round;
  /// Time average of W_t.
  double rate = 0.0;
  std::size_t period_used = 1;
  double residual = 0.0;
};

/// Per-round distributions of U_t come from powers of the global kernel; the
/// rate averages W over the d periodic limits of the chain restricted to the
/// reachable states.
WorkReport work_rate(const PerceptActionLoop& loop, std::size_t rounds = 4, double tol = 1e-10,
                     std::size_t max_iter = 1000000);

/// W for a single distribution over U, in nats.
double work_term(const GlobalChain& chain, std::span<const double> p);

/// I[A_{0:t+1} S_{0:t} ; S_t | M_t] in nats.
double predictiveness_score(const PerceptActionLoop& loop, std::size_t t,
                            std::size_t budget = kDefaultTrajectoryBudget);

struct PredictivenessEstimate {
  /// Mean of the scores for t < horizon, in nats. A truncated estimate of the
  /// time average, not its limit.
  double mean = 0.0;
  /// Score of the last round included.
  double last = 0.0;
  std::size_t horizon = 0;
  std::vector<double> scores;
};

PredictivenessEstimate am_predictiveness(const PerceptActionLoop& loop, std::size_t horizon,
                                         std::size_t budget = kDefaultTrajectoryBudget);

/// I[A_{0:t+1} S_{0:t} ; S_{t:t+k} | M_t] in nats.
double future_predictiveness(const PerceptActionLoop& loop, std::size_t t, std::size_t k,
                             std::size_t budget = kDefaultTrajectoryBudget);

struct MaxEntropyActions {
  bool holds = false;
  /// Time average of H(A_t | M_t), in nats.
  double estimate = 0.0;
};

/// Compares the exact time average of H(A_t | M_t) with ln |A| within tol
/// (nats).
MaxEntropyActions has_max_entropy_actions(const PerceptActionLoop& loop, double tol = 1e-9);

/// Restriction of the chain to its reachable states, with the map back to
/// global indices.
struct ReachableSubchain {
  TransitionKernel kernel;
  Distribution initial;
  std::vector<std::size_t> states;
};
ReachableSubchain reachable_subchain(const GlobalChain& chain);

/// Time-averaged functional of the distribution of U_t via the asymptotic
/// profile: (1/d) sum_r g(p0 Phi^(r)). `g` receives full-length vectors.
struct CesaroValue {
  double value = 0.0;
  std::size_t period = 1;
  double residual = 0.0;
};
template <class G>
CesaroValue cesaro_functional(const GlobalChain& chain, G&& g, double tol = 1e-10,
                              std::size_t max_iter = 1000000) {
  const auto sub = reachable_subchain(chain);
  const auto prof = asymptotic_profile(sub.kernel, tol, max_iter);
  CesaroValue out;
  out.period = prof.period_lcm;
  out.residual = prof.residual;
  std::vector<double> full(chain.size());
  for (const auto& lim : prof.subsequence_limits) {
    const auto p = propagate(sub.initial, lim);
    std::fill(full.begin(), full.end(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) full[sub.states[i]] = p[i];
    out.value += g(std::span<const double>(full));
  }
  out.value /= static_cast<double>(prof.period_lcm);
  return out;
}

}  // namespace workcap

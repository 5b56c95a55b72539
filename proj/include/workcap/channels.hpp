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

// Hidden Markov environment and agent models.
//
// Environment kernel rows are indexed by (a, z) as a * Z + z and columns by
// (s, z') as s * Z + z'. Agent kernel rows are indexed by (s, m) as s * M + m
// and columns by (a', m') as a' * M + m'. Actions and percepts share a single
// alphabet.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "workcap/markov.hpp"

namespace workcap {

struct EnvironmentModel {
  std::vector<std::string> alphabet;
  std::vector<std::string> hidden_states;
  TransitionKernel kernel;
  Distribution initial;

  std::size_t n_symbols() const noexcept { return alphabet.size(); }
  std::size_t n_hidden() const noexcept { return hidden_states.size(); }

  /// phi(s, z' | a, z)
  double phi(std::size_t s, std::size_t z_next, std::size_t a, std::size_t z) const {
    return kernel(a * n_hidden() + z, s * n_hidden() + z_next);
  }
  /// sum_{z'} phi(s, z' | a, z)
  double emission(std::size_t s, std::size_t a, std::size_t z) const;
};

struct AgentModel {
  std::vector<std::string> alphabet;
  std::vector<std::string> memory_states;
  TransitionKernel kernel;
  /// p(a0, m0) indexed a * M + m.
  Distribution initial;

  std::size_t n_symbols() const noexcept { return alphabet.size(); }
  std::size_t n_memory() const noexcept { return memory_states.size(); }

  /// theta(a', m' | s, m)
  double theta(std::size_t a_next, std::size_t m_next, std::size_t s, std::size_t m) const {
    return kernel(s * n_memory() + m, a_next * n_memory() + m_next);
  }
};

/// Builds an environment whose action and percept alphabets may differ in
/// size. `phi` has rows a * Z + z over the action alphabet and columns
/// s * Z + z' over the percept alphabet. The smaller alphabet is embedded into
/// the larger one: extra actions get an explicit copy of the rows of the
/// first action, extra percepts get probability zero. Throws ArgumentError
/// listing violations if the result does not validate.
EnvironmentModel make_environment(const std::vector<std::string>& actions,
                                  const std::vector<std::string>& percepts,
                                  std::vector<std::string> hidden_states, const Matrix& phi,
                                  Distribution initial);

/// Same-alphabet constructors. Throw ArgumentError listing violations.
EnvironmentModel make_environment(std::vector<std::string> alphabet, std::vector<std::string> hidden_states,
                                  Matrix phi, Distribution initial);
AgentModel make_agent(std::vector<std::string> alphabet, std::vector<std::string> memory_states,
                      Matrix theta, Distribution initial);

/// Every violated invariant, one message per offending row. Empty when valid.
std::vector<std::string> validate(const EnvironmentModel& env);
std::vector<std::string> validate(const AgentModel& agent);

/// Hidden states reachable from the initial distribution under any actions.
std::vector<bool> reachable_hidden_states(const EnvironmentModel& env);

bool is_noiseless(const EnvironmentModel& env);

/// The reduced kernel phi(s | a) when the emission law does not depend on
/// the reachable hidden state.
std::optional<TransitionKernel> is_memoryless_invariant(const EnvironmentModel& env);

/// Default enumeration budget for finite-horizon channel laws.
inline constexpr std::size_t kDefaultTableBudget = 10'000'000;

/// Finite-horizon certificate: true iff nu(s_{0:T} | a_{0:T}) agrees within
/// 1e-12 across all action sequences of length `horizon`. Agreement up to T
/// says nothing about longer horizons. Throws ResourceError when the
/// enumeration exceeds `budget` entries.
bool is_product(const EnvironmentModel& env, std::size_t horizon = 4,
                std::size_t budget = kDefaultTableBudget);

class UnifilarityMap {
 public:
  UnifilarityMap(std::size_t n_symbols, std::size_t n_hidden, std::vector<std::size_t> next)
      : n_symbols_(n_symbols), n_hidden_(n_hidden), next_(std::move(next)) {}

  /// z' = f(a, z, s)
  std::size_t operator()(std::size_t a, std::size_t z, std::size_t s) const {
    return next_[(a * n_hidden_ + z) * n_symbols_ + s];
  }
  std::size_t n_symbols() const noexcept { return n_symbols_; }
  std::size_t n_hidden() const noexcept { return n_hidden_; }

 private:
  std::size_t n_symbols_;
  std::size_t n_hidden_;
  std::vector<std::size_t> next_;
};

/// Present iff the initial distribution is a delta and every reachable
/// (a, z, s) leads to at most one next state. Triples with zero probability
/// or an unreachable z map to z itself.
std::optional<UnifilarityMap> is_unifilar(const EnvironmentModel& env);

/// Index of the state carrying all initial mass, if any.
std::optional<std::size_t> delta_state(const Distribution& p);

/// Series connection: percepts of env1 are the actions of env2. Hidden states
/// are pairs (z1, z2) indexed z1 * Z2 + z2.
EnvironmentModel cascade(const EnvironmentModel& env1, const EnvironmentModel& env2);

/// nu(s_{0:T} | a_{0:T}) for the given action sequence; the result is indexed
/// by percept sequences with the last percept varying fastest.
std::vector<double> channel_law(const EnvironmentModel& env, const std::vector<std::size_t>& actions);

}  // namespace workcap

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

#include "workcap/agents.hpp"

#include "workcap/errors.hpp"

namespace workcap {

namespace {

void require_alphabet(const std::vector<std::string>& alphabet) {
  if (alphabet.empty()) throw ArgumentError("agent alphabet is empty");
}

void require_action(const std::vector<std::string>& alphabet, std::size_t a) {
  if (a >= alphabet.size()) throw DimensionError("initial action index out of range");
}

// Deterministic map from (s, m) to (a', m') as a 0/1 kernel.
template <class F>
Matrix deterministic(std::size_t A, std::size_t M, F&& f) {
  Matrix k(A * M, A * M);
  for (std::size_t s = 0; s < A; ++s)
    for (std::size_t m = 0; m < M; ++m) {
      const auto [a, mn] = f(s, m);
      k(s * M + m, a * M + mn) = 1.0;
    }
  return k;
}

}  // namespace

AgentModel build_identity(const std::vector<std::string>& alphabet, std::size_t initial_action) {
  require_alphabet(alphabet);
  require_action(alphabet, initial_action);
  const std::size_t A = alphabet.size();
  Distribution init(A, 0.0);
  init[initial_action] = 1.0;
  return make_agent(alphabet, {"m"}, deterministic(A, 1, [](std::size_t s, std::size_t) {
                      return std::pair<std::size_t, std::size_t>{s, 0};
                    }),
                    std::move(init));
}

AgentModel build_memoryless(const std::vector<std::string>& alphabet, const Distribution& p) {
  require_alphabet(alphabet);
  const std::size_t A = alphabet.size();
  if (p.size() != A) throw DimensionError("action distribution length differs from the alphabet size");
  check_distribution(p);
  Matrix k(A, A);
  for (std::size_t s = 0; s < A; ++s)
    for (std::size_t a = 0; a < A; ++a) k(s, a) = p[a];
  return make_agent(alphabet, {"m"}, std::move(k), p);
}

AgentModel build_uniform(const std::vector<std::string>& alphabet) {
  require_alphabet(alphabet);
  return build_memoryless(alphabet, Distribution(alphabet.size(), 1.0 / static_cast<double>(alphabet.size())));
}

AgentModel build_last_action(const std::vector<std::string>& alphabet, const Distribution& p,
                             std::size_t initial_action) {
  require_alphabet(alphabet);
  require_action(alphabet, initial_action);
  const std::size_t A = alphabet.size();
  if (p.size() != A) throw DimensionError("action distribution length differs from the alphabet size");
  check_distribution(p);
  const std::size_t M = A;
  Matrix k(A * M, A * M);
  for (std::size_t s = 0; s < A; ++s)
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t a = 0; a < A; ++a) k(s * M + m, a * M + a) = p[a];
  Distribution init(A * M, 0.0);
  init[initial_action * M + initial_action] = 1.0;
  return make_agent(alphabet, alphabet, std::move(k), std::move(init));
}

namespace {

// u(z, s) for sources, or nullopt when some reachable (z, s) is updated
// differently by different actions or emitted under only some of them.
std::optional<std::vector<std::size_t>> action_free_update(const EnvironmentModel& env, const UnifilarityMap& f) {
  const std::size_t A = env.n_symbols(), Z = env.n_hidden();
  const auto reach = reachable_hidden_states(env);
  std::vector<std::size_t> u(Z * A);
  for (std::size_t z = 0; z < Z; ++z)
    for (std::size_t s = 0; s < A; ++s) {
      u[z * A + s] = f(0, z, s);
      if (!reach[z]) continue;
      const bool positive0 = env.emission(s, 0, z) > 0.0;
      for (std::size_t a = 1; a < A; ++a) {
        const bool positive = env.emission(s, a, z) > 0.0;
        if (positive != positive0) return std::nullopt;
        if (positive && f(a, z, s) != u[z * A + s]) return std::nullopt;
      }
    }
  return u;
}

}  // namespace

bool predictive_shortcut_applies(const EnvironmentModel& env) {
  const auto f = is_unifilar(env);
  return f && is_product(env) && action_free_update(env, *f).has_value();
}

AgentModel build_predictive(const AgentModel& base, const EnvironmentModel& env, PredictiveCircuit circuit) {
  if (base.alphabet != env.alphabet) throw DimensionError("agent and environment use different alphabets");
  const auto f = is_unifilar(env);
  if (!f) throw ClassError("predictive construction requires a unifilar environment");
  const std::size_t A = env.n_symbols(), Z = env.n_hidden(), Mb = base.n_memory();
  const std::size_t z0 = *delta_state(env.initial);

  std::optional<std::vector<std::size_t>> u;
  if (circuit != PredictiveCircuit::full && is_product(env)) u = action_free_update(env, *f);
  if (circuit == PredictiveCircuit::product_shortcut && !u)
    throw ClassError("product shortcut requires a product environment with an action-independent state update");

  if (u) {
    // Memory (m', z) indexed m' * Z + z.
    const std::size_t M = Mb * Z;
    Matrix k(A * M, A * M);
    for (std::size_t s = 0; s < A; ++s)
      for (std::size_t mb = 0; mb < Mb; ++mb)
        for (std::size_t z = 0; z < Z; ++z) {
          const std::size_t zn = (*u)[z * A + s];
          for (std::size_t a = 0; a < A; ++a)
            for (std::size_t mbn = 0; mbn < Mb; ++mbn)
              k(s * M + mb * Z + z, a * M + mbn * Z + zn) = base.theta(a, mbn, s, mb);
        }
    Distribution init(A * M, 0.0);
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t mb = 0; mb < Mb; ++mb) init[a * M + mb * Z + z0] = base.initial[a * Mb + mb];
    std::vector<std::string> labels;
    for (std::size_t mb = 0; mb < Mb; ++mb)
      for (std::size_t z = 0; z < Z; ++z) labels.push_back(base.memory_states[mb] + "|" + env.hidden_states[z]);
    return make_agent(base.alphabet, std::move(labels), std::move(k), std::move(init));
  }

  // Memory (m', y, z) indexed (m' * A + y) * Z + z; y is the previous action.
  const std::size_t M = Mb * A * Z;
  auto mem = [&](std::size_t mb, std::size_t y, std::size_t z) { return (mb * A + y) * Z + z; };
  Matrix k(A * M, A * M);
  for (std::size_t s = 0; s < A; ++s)
    for (std::size_t mb = 0; mb < Mb; ++mb)
      for (std::size_t y = 0; y < A; ++y)
        for (std::size_t z = 0; z < Z; ++z) {
          const std::size_t zn = (*f)(y, z, s);
          for (std::size_t a = 0; a < A; ++a)
            for (std::size_t mbn = 0; mbn < Mb; ++mbn)
              k(s * M + mem(mb, y, z), a * M + mem(mbn, a, zn)) = base.theta(a, mbn, s, mb);
        }
  Distribution init(A * M, 0.0);
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t mb = 0; mb < Mb; ++mb) init[a * M + mem(mb, a, z0)] = base.initial[a * Mb + mb];
  std::vector<std::string> labels;
  for (std::size_t mb = 0; mb < Mb; ++mb)
    for (std::size_t y = 0; y < A; ++y)
      for (std::size_t z = 0; z < Z; ++z)
        labels.push_back(base.memory_states[mb] + "|" + base.alphabet[y] + "|" + env.hidden_states[z]);
  return make_agent(base.alphabet, std::move(labels), std::move(k), std::move(init));
}

}  // namespace workcap

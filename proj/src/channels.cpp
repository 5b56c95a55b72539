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

#include "workcap/channels.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "workcap/errors.hpp"

namespace workcap {

namespace {

constexpr double kTol = 1e-12;

std::vector<std::string> check_rows(const Matrix& m, const std::vector<std::string>& row_names) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    bool bad_entry = false;
    for (double x : m.row(i)) {
      if (!(x >= 0.0 && x <= 1.0)) bad_entry = true;
      sum += x;
    }
    if (bad_entry) out.push_back("row (" + row_names[i] + ") has an entry outside [0, 1]");
    if (!(std::abs(sum - 1.0) <= kTol)) {
      std::ostringstream os;
      os << "row (" << row_names[i] << ") sums to " << sum;
      out.push_back(os.str());
    }
  }
  return out;
}

void check_initial(const Distribution& p, std::size_t size, const char* what, std::vector<std::string>& out) {
  if (p.size() != size) {
    out.push_back(std::string(what) + " has " + std::to_string(p.size()) + " entries, expected " +
                  std::to_string(size));
    return;
  }
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) {
      out.push_back(std::string(what) + " has an entry outside [0, 1]");
      break;
    }
    sum += x;
  }
  if (!(std::abs(sum - 1.0) <= kTol)) {
    std::ostringstream os;
    os << what << " sums to " << sum;
    out.push_back(os.str());
  }
}

std::string join_violations(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += "; ";
    s += x;
  }
  return s;
}

}  // namespace

double EnvironmentModel::emission(std::size_t s, std::size_t a, std::size_t z) const {
  double sum = 0.0;
  for (std::size_t zn = 0; zn < n_hidden(); ++zn) sum += phi(s, zn, a, z);
  return sum;
}

std::vector<std::string> validate(const EnvironmentModel& env) {
  std::vector<std::string> out;
  const std::size_t A = env.n_symbols(), Z = env.n_hidden();
  if (A == 0) out.push_back("empty alphabet");
  if (Z == 0) out.push_back("no hidden states");
  if (!out.empty()) return out;
  if (env.kernel.n_in() != A * Z || env.kernel.n_out() != A * Z) {
    out.push_back("kernel is " + std::to_string(env.kernel.n_in()) + "x" + std::to_string(env.kernel.n_out()) +
                  ", expected " + std::to_string(A * Z) + "x" + std::to_string(A * Z));
    return out;
  }
  std::vector<std::string> names;
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t z = 0; z < Z; ++z) names.push_back(env.alphabet[a] + "," + env.hidden_states[z]);
  out = check_rows(env.kernel.matrix(), names);
  check_initial(env.initial, Z, "initial distribution", out);
  return out;
}

std::vector<std::string> validate(const AgentModel& agent) {
  std::vector<std::string> out;
  const std::size_t A = agent.n_symbols(), M = agent.n_memory();
  if (A == 0) out.push_back("empty alphabet");
  if (M == 0) out.push_back("no memory states");
  if (!out.empty()) return out;
  if (agent.kernel.n_in() != A * M || agent.kernel.n_out() != A * M) {
    out.push_back("kernel is " + std::to_string(agent.kernel.n_in()) + "x" +
                  std::to_string(agent.kernel.n_out()) + ", expected " + std::to_string(A * M) + "x" +
                  std::to_string(A * M));
    return out;
  }
  std::vector<std::string> names;
  for (std::size_t s = 0; s < A; ++s)
    for (std::size_t m = 0; m < M; ++m) names.push_back(agent.alphabet[s] + "," + agent.memory_states[m]);
  out = check_rows(agent.kernel.matrix(), names);
  check_initial(agent.initial, A * M, "initial distribution", out);
  return out;
}

EnvironmentModel make_environment(std::vector<std::string> alphabet, std::vector<std::string> hidden_states,
                                  Matrix phi, Distribution initial) {
  EnvironmentModel env{std::move(alphabet), std::move(hidden_states), TransitionKernel::unchecked(std::move(phi)),
                       std::move(initial)};
  if (auto v = validate(env); !v.empty()) throw ArgumentError("invalid environment: " + join_violations(v));
  return env;
}

EnvironmentModel make_environment(const std::vector<std::string>& actions,
                                  const std::vector<std::string>& percepts,
                                  std::vector<std::string> hidden_states, const Matrix& phi,
                                  Distribution initial) {
  const std::size_t nA = actions.size(), nS = percepts.size(), Z = hidden_states.size();
  if (phi.rows() != nA * Z || phi.cols() != nS * Z)
    throw DimensionError("make_environment: kernel shape does not match alphabets and hidden states");
  const std::size_t n = std::max(nA, nS);
  Matrix full(n * Z, n * Z);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t src = a < nA ? a : 0;
    for (std::size_t z = 0; z < Z; ++z)
      for (std::size_t s = 0; s < nS; ++s)
        for (std::size_t zn = 0; zn < Z; ++zn) full(a * Z + z, s * Z + zn) = phi(src * Z + z, s * Z + zn);
  }
  const auto& alphabet = nA >= nS ? actions : percepts;
  return make_environment(alphabet, std::move(hidden_states), std::move(full), std::move(initial));
}

AgentModel make_agent(std::vector<std::string> alphabet, std::vector<std::string> memory_states, Matrix theta,
                      Distribution initial) {
  AgentModel agent{std::move(alphabet), std::move(memory_states), TransitionKernel::unchecked(std::move(theta)),
                   std::move(initial)};
  if (auto v = validate(agent); !v.empty()) throw ArgumentError("invalid agent: " + join_violations(v));
  return agent;
}

std::vector<bool> reachable_hidden_states(const EnvironmentModel& env) {
  const std::size_t A = env.n_symbols(), Z = env.n_hidden();
  std::vector<bool> seen(Z, false);
  std::deque<std::size_t> queue;
  for (std::size_t z = 0; z < Z; ++z)
    if (env.initial[z] > 0.0) {
      seen[z] = true;
      queue.push_back(z);
    }
  while (!queue.empty()) {
    const std::size_t z = queue.front();
    queue.pop_front();
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t s = 0; s < A; ++s)
        for (std::size_t zn = 0; zn < Z; ++zn)
          if (!seen[zn] && env.phi(s, zn, a, z) > 0.0) {
            seen[zn] = true;
            queue.push_back(zn);
          }
  }
  return seen;
}

bool is_noiseless(const EnvironmentModel& env) {
  const auto reach = reachable_hidden_states(env);
  for (std::size_t z = 0; z < env.n_hidden(); ++z) {
    if (!reach[z]) continue;
    for (std::size_t a = 0; a < env.n_symbols(); ++a)
      for (std::size_t s = 0; s < env.n_symbols(); ++s)
        if (std::abs(env.emission(s, a, z) - (s == a ? 1.0 : 0.0)) > kTol) return false;
  }
  return true;
}

std::optional<TransitionKernel> is_memoryless_invariant(const EnvironmentModel& env) {
  const std::size_t A = env.n_symbols();
  const auto reach = reachable_hidden_states(env);
  std::optional<std::size_t> ref;
  for (std::size_t z = 0; z < env.n_hidden(); ++z) {
    if (!reach[z]) continue;
    if (!ref) {
      ref = z;
      continue;
    }
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t s = 0; s < A; ++s)
        if (std::abs(env.emission(s, a, z) - env.emission(s, a, *ref)) > kTol) return std::nullopt;
  }
  Matrix reduced(A, A);
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t s = 0; s < A; ++s) reduced(a, s) = env.emission(s, a, *ref);
  return TransitionKernel::unchecked(std::move(reduced));
}

std::vector<double> channel_law(const EnvironmentModel& env, const std::vector<std::size_t>& actions) {
  const std::size_t S = env.n_symbols(), Z = env.n_hidden();
  const std::size_t T = actions.size();
  std::size_t size = 1;
  for (std::size_t t = 0; t < T; ++t) size *= S;
  std::vector<double> law(size, 0.0);
  // Depth-first over percept prefixes carrying the forward vector over z.
  std::vector<std::vector<double>> alpha(T + 1, std::vector<double>(Z));
  alpha[0] = env.initial;
  std::vector<std::size_t> digit(T, 0);
  auto recurse = [&](auto&& self, std::size_t t, std::size_t idx) -> void {
    if (t == T) {
      double p = 0.0;
      for (double x : alpha[T]) p += x;
      law[idx] = p;
      return;
    }
    const std::size_t a = actions[t];
    for (std::size_t s = 0; s < S; ++s) {
      auto& next = alpha[t + 1];
      std::fill(next.begin(), next.end(), 0.0);
      double mass = 0.0;
      for (std::size_t z = 0; z < Z; ++z) {
        const double w = alpha[t][z];
        if (w == 0.0) continue;
        for (std::size_t zn = 0; zn < Z; ++zn) {
          const double v = w * env.phi(s, zn, a, z);
          next[zn] += v;
          mass += v;
        }
      }
      if (mass == 0.0) continue;
      self(self, t + 1, idx * S + s);
    }
  };
  recurse(recurse, 0, 0);
  return law;
}

bool is_product(const EnvironmentModel& env, std::size_t horizon, std::size_t budget) {
  if (horizon == 0) throw ArgumentError("is_product: horizon must be at least 1");
  const std::size_t A = env.n_symbols();
  std::size_t required = env.n_hidden();
  for (std::size_t t = 0; t < horizon; ++t) {
    if (required > budget / (A * A)) throw ResourceError("is_product: enumeration exceeds budget", budget + 1);
    required *= A * A;
  }
  if (required > budget) throw ResourceError("is_product: enumeration exceeds budget", required);

  std::vector<std::size_t> actions(horizon, 0);
  const std::vector<double> reference = channel_law(env, actions);
  for (;;) {
    std::size_t t = horizon;
    while (t > 0) {
      --t;
      if (++actions[t] < A) break;
      actions[t] = 0;
      if (t == 0) return true;
    }
    const auto law = channel_law(env, actions);
    for (std::size_t i = 0; i < law.size(); ++i)
      if (std::abs(law[i] - reference[i]) > kTol) return false;
  }
}

std::optional<std::size_t> delta_state(const Distribution& p) {
  std::optional<std::size_t> at;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (at || std::abs(p[i] - 1.0) > kTol) return std::nullopt;
    at = i;
  }
  return at;
}

std::optional<UnifilarityMap> is_unifilar(const EnvironmentModel& env) {
  if (!delta_state(env.initial)) return std::nullopt;
  const std::size_t A = env.n_symbols(), Z = env.n_hidden();
  const auto reach = reachable_hidden_states(env);
  std::vector<std::size_t> next(A * Z * A);
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t z = 0; z < Z; ++z)
      for (std::size_t s = 0; s < A; ++s) {
        std::optional<std::size_t> target;
        if (reach[z]) {
          for (std::size_t zn = 0; zn < Z; ++zn) {
            if (env.phi(s, zn, a, z) <= 0.0) continue;
            if (target) return std::nullopt;
            target = zn;
          }
        }
        next[(a * Z + z) * A + s] = target.value_or(z);
      }
  return UnifilarityMap(A, Z, std::move(next));
}

EnvironmentModel cascade(const EnvironmentModel& env1, const EnvironmentModel& env2) {
  if (env1.alphabet != env2.alphabet)
    throw DimensionError("cascade: percept alphabet of the first channel differs from the action alphabet of the second");
  const std::size_t A = env1.n_symbols(), Z1 = env1.n_hidden(), Z2 = env2.n_hidden(), Z = Z1 * Z2;
  Matrix phi(A * Z, A * Z);
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t z1 = 0; z1 < Z1; ++z1)
      for (std::size_t z2 = 0; z2 < Z2; ++z2)
        for (std::size_t i = 0; i < A; ++i)
          for (std::size_t z1n = 0; z1n < Z1; ++z1n) {
            const double p1 = env1.phi(i, z1n, a, z1);
            if (p1 == 0.0) continue;
            for (std::size_t s = 0; s < A; ++s)
              for (std::size_t z2n = 0; z2n < Z2; ++z2n)
                phi(a * Z + z1 * Z2 + z2, s * Z + z1n * Z2 + z2n) += env2.phi(s, z2n, i, z2) * p1;
          }
  std::vector<std::string> hidden;
  Distribution initial(Z);
  for (std::size_t z1 = 0; z1 < Z1; ++z1)
    for (std::size_t z2 = 0; z2 < Z2; ++z2) {
      hidden.push_back(env1.hidden_states[z1] + "|" + env2.hidden_states[z2]);
      initial[z1 * Z2 + z2] = env1.initial[z1] * env2.initial[z2];
    }
  // Products of valid rows can drift from one by a few ulps.
  for (std::size_t r = 0; r < phi.rows(); ++r) {
    double sum = 0.0;
    for (double x : phi.row(r)) sum += x;
    for (double& x : phi.row(r)) x /= sum;
  }
  return make_environment(env1.alphabet, std::move(hidden), std::move(phi), std::move(initial));
}

}  // namespace workcap

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

#include "workcap/loop.hpp"

#include <cmath>
#include <cstdio>

#include "workcap/errors.hpp"

namespace workcap {

PerceptActionLoop::PerceptActionLoop(AgentModel a, EnvironmentModel e) : agent(std::move(a)), env(std::move(e)) {
  if (agent.alphabet != env.alphabet)
    throw DimensionError("agent and environment use different alphabets");
}

std::string var_m(std::size_t t) { return "M" + std::to_string(t); }
std::string var_a(std::size_t t) { return "A" + std::to_string(t); }
std::string var_s(std::size_t t) { return "S" + std::to_string(t); }
std::string var_z(std::size_t t) { return "Z" + std::to_string(t); }

GlobalChain build_global_chain(const PerceptActionLoop& loop) {
  const auto& agt = loop.agent;
  const auto& env = loop.env;
  GlobalChain g;
  g.n_memory = agt.n_memory();
  g.n_symbols = env.n_symbols();
  g.n_hidden = env.n_hidden();
  const std::size_t M = g.n_memory, A = g.n_symbols, Z = g.n_hidden, N = g.size();

  // emit[(a * Z + z) * A + s] = p(s | a, z)
  std::vector<double> emit(A * Z * A);
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t z = 0; z < Z; ++z)
      for (std::size_t s = 0; s < A; ++s) emit[(a * Z + z) * A + s] = env.emission(s, a, z);

  g.initial.assign(N, 0.0);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t s = 0; s < A; ++s)
        for (std::size_t z = 0; z < Z; ++z)
          g.initial[g.index(m, a, s, z)] = agt.initial[a * M + m] * env.initial[z] * emit[(a * Z + z) * A + s];

  Matrix k(N, N);
  g.placeholder.assign(N, false);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t s = 0; s < A; ++s)
        for (std::size_t z = 0; z < Z; ++z) {
          const std::size_t row = g.index(m, a, s, z);
          const double denom = emit[(a * Z + z) * A + s];
          if (denom == 0.0) {
            g.placeholder[row] = true;
            for (double& x : k.row(row)) x = 1.0 / static_cast<double>(N);
            continue;
          }
          for (std::size_t zn = 0; zn < Z; ++zn) {
            const double fz = env.phi(s, zn, a, z) / denom;
            if (fz == 0.0) continue;
            for (std::size_t mn = 0; mn < M; ++mn)
              for (std::size_t an = 0; an < A; ++an) {
                const double th = agt.theta(an, mn, s, m);
                if (th == 0.0) continue;
                for (std::size_t sn = 0; sn < A; ++sn)
                  k(row, g.index(mn, an, sn, zn)) = emit[(an * Z + zn) * A + sn] * th * fz;
              }
          }
        }
  g.kernel = TransitionKernel::unchecked(std::move(k));
  g.reachable = reachable_from(g.kernel, g.initial);
  return g;
}

ReachableSubchain reachable_subchain(const GlobalChain& chain) {
  ReachableSubchain sub;
  for (std::size_t i = 0; i < chain.size(); ++i)
    if (chain.reachable[i]) sub.states.push_back(i);
  const std::size_t n = sub.states.size();
  Matrix k(n, n);
  sub.initial.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sub.initial[i] = chain.initial[sub.states[i]];
    for (std::size_t j = 0; j < n; ++j) k(i, j) = chain.kernel(sub.states[i], sub.states[j]);
  }
  sub.kernel = TransitionKernel::unchecked(std::move(k));
  return sub;
}

TrajectoryDistribution trajectory_distribution(const PerceptActionLoop& loop, std::size_t horizon,
                                               std::size_t budget) {
  if (horizon == 0) throw ArgumentError("trajectory_distribution: horizon must be at least 1");
  const auto& agt = loop.agent;
  const auto& env = loop.env;
  const std::size_t M = agt.n_memory(), A = env.n_symbols(), Z = env.n_hidden();
  const std::size_t N = M * A * A * Z;
  std::size_t size = 1;
  for (std::size_t t = 0; t < horizon; ++t) {
    if (size > budget / N) {
      const double req = std::pow(static_cast<double>(N), static_cast<double>(horizon));
      char buf[96];
      std::snprintf(buf, sizeof buf, "trajectory table needs %.6g entries, budget is %zu", req, budget);
      throw ResourceError(buf, req >= 1.8e19 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(req));
    }
    size *= N;
  }

  std::vector<double> probs(size, 0.0);
  auto idx = [&](std::size_t m, std::size_t a, std::size_t s, std::size_t z) {
    return ((m * A + a) * A + s) * Z + z;
  };
  auto recurse = [&](auto&& self, std::size_t t, std::size_t m, std::size_t a, std::size_t s, std::size_t z,
                     std::size_t prefix, double w) -> void {
    const std::size_t here = prefix * N + idx(m, a, s, z);
    if (t + 1 == horizon) {
      probs[here] = w * env.emission(s, a, z);
      return;
    }
    for (std::size_t zn = 0; zn < Z; ++zn) {
      const double f = env.phi(s, zn, a, z);
      if (f == 0.0) continue;
      for (std::size_t mn = 0; mn < M; ++mn)
        for (std::size_t an = 0; an < A; ++an) {
          const double th = agt.theta(an, mn, s, m);
          if (th == 0.0) continue;
          for (std::size_t sn = 0; sn < A; ++sn) self(self, t + 1, mn, an, sn, zn, here, w * f * th);
        }
    }
  };
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t a = 0; a < A; ++a) {
      const double pa = agt.initial[a * M + m];
      if (pa == 0.0) continue;
      for (std::size_t z = 0; z < Z; ++z) {
        if (env.initial[z] == 0.0) continue;
        for (std::size_t s = 0; s < A; ++s) recurse(recurse, 0, m, a, s, z, 0, pa * env.initial[z]);
      }
    }

  std::vector<Variable> vars;
  for (std::size_t t = 0; t < horizon; ++t) {
    vars.push_back({var_m(t), M});
    vars.push_back({var_a(t), A});
    vars.push_back({var_s(t), A});
    vars.push_back({var_z(t), Z});
  }
  return {horizon, JointTable(std::move(vars), std::move(probs))};
}

double work_term(const GlobalChain& chain, std::span<const double> p) {
  const std::size_t M = chain.n_memory, A = chain.n_symbols, Z = chain.n_hidden;
  std::vector<double> pma(M * A, 0.0), pms(M * A, 0.0);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t s = 0; s < A; ++s)
        for (std::size_t z = 0; z < Z; ++z) {
          const double x = p[chain.index(m, a, s, z)];
          pma[m * A + a] += x;
          pms[m * A + s] += x;
        }
  // H(A|M) - H(S|M) = H(M,A) - H(M,S)
  return shannon_entropy(pma) - shannon_entropy(pms);
}

WorkReport work_rate(const PerceptActionLoop& loop, std::size_t rounds, double tol, std::size_t max_iter) {
  const auto chain = build_global_chain(loop);
  WorkReport rep;
  std::vector<double> p = chain.initial;
  for (std::size_t t = 0; t < rounds; ++t) {
    rep.per_round.push_back(work_term(chain, p));
    p = propagate(p, chain.kernel.matrix());
  }
  const auto cv = cesaro_functional(
      chain, [&](std::span<const double> q) { return work_term(chain, q); }, tol, max_iter);
  rep.rate = cv.value;
  rep.period_used = cv.period;
  rep.residual = cv.residual;
  return rep;
}

double predictiveness_score(const PerceptActionLoop& loop, std::size_t t, std::size_t budget) {
  const auto traj = trajectory_distribution(loop, t + 1, budget);
  std::vector<std::string> past;
  for (std::size_t i = 0; i <= t; ++i) past.push_back(var_a(i));
  for (std::size_t i = 0; i < t; ++i) past.push_back(var_s(i));
  return conditional_mutual_information(traj.joint, past, {var_s(t)}, {var_m(t)});
}

PredictivenessEstimate am_predictiveness(const PerceptActionLoop& loop, std::size_t horizon, std::size_t budget) {
  if (horizon == 0) throw ArgumentError("am_predictiveness: horizon must be at least 1");
  PredictivenessEstimate est;
  est.horizon = horizon;
  const auto traj = trajectory_distribution(loop, horizon, budget);
  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<std::string> past;
    for (std::size_t i = 0; i <= t; ++i) past.push_back(var_a(i));
    for (std::size_t i = 0; i < t; ++i) past.push_back(var_s(i));
    est.scores.push_back(conditional_mutual_information(traj.joint, past, {var_s(t)}, {var_m(t)}));
  }
  for (double s : est.scores) est.mean += s;
  est.mean /= static_cast<double>(horizon);
  est.last = est.scores.back();
  return est;
}

double future_predictiveness(const PerceptActionLoop& loop, std::size_t t, std::size_t k, std::size_t budget) {
  if (k == 0) throw ArgumentError("future_predictiveness: future length must be at least 1");
  const auto traj = trajectory_distribution(loop, t + k, budget);
  std::vector<std::string> past, future;
  for (std::size_t i = 0; i <= t; ++i) past.push_back(var_a(i));
  for (std::size_t i = 0; i < t; ++i) past.push_back(var_s(i));
  for (std::size_t i = t; i < t + k; ++i) future.push_back(var_s(i));
  return conditional_mutual_information(traj.joint, past, future, {var_m(t)});
}

MaxEntropyActions has_max_entropy_actions(const PerceptActionLoop& loop, double tol) {
  const auto chain = build_global_chain(loop);
  const std::size_t M = chain.n_memory, A = chain.n_symbols, Z = chain.n_hidden;
  const auto cv = cesaro_functional(chain, [&](std::span<const double> p) {
    std::vector<double> pm(M, 0.0), pma(M * A, 0.0);
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t a = 0; a < A; ++a)
        for (std::size_t s = 0; s < A; ++s)
          for (std::size_t z = 0; z < Z; ++z) {
            const double x = p[chain.index(m, a, s, z)];
            pm[m] += x;
            pma[m * A + a] += x;
          }
    return shannon_entropy(pma) - shannon_entropy(pm);
  });
  MaxEntropyActions out;
  out.estimate = cv.value;
  out.holds = std::abs(cv.value - std::log(static_cast<double>(A))) <= tol;
  return out;
}

}  // namespace workcap

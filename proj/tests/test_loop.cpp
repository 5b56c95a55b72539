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

#include <cmath>
#include <numeric>

#include "workcap/agents.hpp"
#include "workcap/errors.hpp"
#include "workcap/loop.hpp"
#include "workcap/model_io.hpp"
#include "workcap/verification.hpp"

using namespace workcap;

namespace {

const double kLn2 = std::log(2.0);

EnvironmentModel bundled(const char* name) {
  return load_environment(std::filesystem::path(WORKCAP_MODELS_DIR) / name);
}

double h2(double p) { return shannon_entropy(std::vector<double>{p, 1.0 - p}); }

}  // namespace

TEST_CASE("global chain is a valid Markov chain") {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const PerceptActionLoop loop(random_agent(rng, 2, 1 + trial % 3), random_environment(rng, 2, 1 + trial % 2));
    const auto chain = build_global_chain(loop);
    CHECK(chain.size() == chain.initial.size());
    CHECK(std::accumulate(chain.initial.begin(), chain.initial.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t u = 0; u < chain.size(); ++u) {
      double sum = 0.0;
      for (double x : chain.kernel.row(u)) sum += x;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("alphabet mismatch is rejected") {
  CHECK_THROWS_AS(PerceptActionLoop(build_uniform(symbols(3)), bundled("fig5.json")), DimensionError);
}

TEST_CASE("trajectory table marginals") {
  Rng rng(42);
  const auto agent = random_agent(rng, 2, 2);
  const auto env = random_environment(rng, 2, 2);
  const PerceptActionLoop loop(agent, env);
  const auto traj = trajectory_distribution(loop, 3);
  CHECK(traj.joint.variables().size() == 12);
  CHECK(traj.joint.variables()[0].name == "M0");
  CHECK(traj.joint.variables()[11].name == "Z2");
  // p(A0, M0) is the agent's initial law.
  const auto am = traj.joint.marginal({var_a(0), var_m(0)});
  for (std::size_t i = 0; i < am.probs().size(); ++i)
    CHECK(am.probs()[i] == doctest::Approx(agent.initial[i]).epsilon(1e-12));
  // p(Z0) is the environment's initial law.
  const auto z0 = traj.joint.marginal({var_z(0)});
  for (std::size_t z = 0; z < 2; ++z) CHECK(z0.probs()[z] == doctest::Approx(env.initial[z]).epsilon(1e-12));
  CHECK_THROWS_AS(trajectory_distribution(loop, 3, 100), ResourceError);
  CHECK_THROWS_AS(trajectory_distribution(loop, 0), ArgumentError);
}

TEST_CASE("per-round work agrees with the trajectory table") {
  Rng rng(43);
  for (int trial = 0; trial < 8; ++trial) {
    const PerceptActionLoop loop(random_agent(rng, 2, 1 + trial % 2), random_environment(rng, 2, 1 + trial % 3));
    const auto rep = work_rate(loop, 4);
    const auto traj = trajectory_distribution(loop, 4);
    for (std::size_t t = 0; t < 4; ++t) {
      const double w = conditional_entropy(traj.joint, {var_a(t)}, {var_m(t)}) -
                       conditional_entropy(traj.joint, {var_s(t)}, {var_m(t)});
      CHECK(rep.per_round[t] == doctest::Approx(w).epsilon(1e-12));
    }
  }
}

TEST_CASE("uniform agent on the fig5 channel") {
  const auto env = bundled("fig5.json");
  const auto rep = work_rate(PerceptActionLoop(build_uniform(env.alphabet), env));
  const double expected_bits = 1.0 - std::log(256.0 / 27.0) / std::log(16.0);
  CHECK(std::abs(from_nats(rep.rate, LogBase::bits) - expected_bits) < 1e-12);
  CHECK(rep.period_used == 1);
  for (double w : rep.per_round) CHECK(w == doctest::Approx(rep.rate).epsilon(1e-12));
}

TEST_CASE("memoryless agents on memoryless channels") {
  // W = H(p) - H(p Phi) in every round.
  Rng rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const auto env = random_environment(rng, 3, 1, RandomEnvKind::memoryless);
    const auto p = random_distribution(rng, 3);
    const auto q = propagate(p, env.kernel.matrix());
    const double expected = shannon_entropy(p) - shannon_entropy(q);
    const auto rep = work_rate(PerceptActionLoop(build_memoryless(env.alphabet, p), env));
    CHECK(rep.rate == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("identity agent extracts nothing") {
  Rng rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    const auto env = random_environment(rng, 2 + trial % 2, 1 + trial % 3);
    const auto rep = work_rate(PerceptActionLoop(build_identity(env.alphabet), env));
    CHECK(std::abs(rep.rate) < 1e-12);
  }
}

TEST_CASE("periodic loop averages over its phases") {
  // Noiseless channel and an agent that answers every percept with the
  // other symbol: actions alternate deterministically.
  const auto env = bundled("identity.json");
  Matrix theta(2, 2);
  theta(0, 1) = 1.0;
  theta(1, 0) = 1.0;
  const auto agent = make_agent(env.alphabet, {"m"}, theta, {1.0, 0.0});
  const auto rep = work_rate(PerceptActionLoop(agent, env));
  CHECK(rep.period_used == 2);
  CHECK(std::abs(rep.rate) < 1e-15);

  // With a biased first action the two phases differ but the rate is their
  // mean.
  const auto mixed = make_agent(env.alphabet, {"m"}, theta, {0.3, 0.7});
  const auto rep2 = work_rate(PerceptActionLoop(mixed, env));
  CHECK(rep2.period_used == 2);
  CHECK(std::abs(rep2.rate) < 1e-12);
}

TEST_CASE("placeholder rows stay unreachable") {
  const auto env = bundled("identity.json");
  const PerceptActionLoop loop(build_identity(env.alphabet), env);
  const auto chain = build_global_chain(loop);
  const auto sub = reachable_subchain(chain);
  // The identity agent only ever sees s = a.
  for (std::size_t u : sub.states) {
    CHECK_FALSE(chain.placeholder[u]);
    const std::size_t s = u / chain.n_hidden % chain.n_symbols;
    const std::size_t a = u / (chain.n_hidden * chain.n_symbols) % chain.n_symbols;
    CHECK(s == a);
  }
  CHECK(sub.states.size() < chain.size());
}

TEST_CASE("predictiveness scores") {
  const auto env = bundled("fig5.json");
  // Memoryless uniform agent: the score at t = 0 is I[A0; S0].
  const PerceptActionLoop uni(build_uniform(env.alphabet), env);
  CHECK(predictiveness_score(uni, 0) == doctest::Approx(h2(0.75) - 0.5 * kLn2).epsilon(1e-12));
  CHECK(future_predictiveness(uni, 1, 1) == doctest::Approx(predictiveness_score(uni, 1)).epsilon(1e-12));
  CHECK(future_predictiveness(uni, 1, 2) >= predictiveness_score(uni, 1) - 1e-12);

  // The last-action agent stores what the memoryless channel needs.
  const PerceptActionLoop last(build_last_action(env.alphabet, {0.5, 0.5}), env);
  const auto est = am_predictiveness(last, 4);
  REQUIRE(est.scores.size() == 4);
  for (double s : est.scores) CHECK(std::abs(s) < 1e-12);
  CHECK_THROWS_AS(am_predictiveness(last, 0), ArgumentError);
}

TEST_CASE("maximum-entropy actions") {
  const auto env = bundled("fig5.json");
  const auto uni = has_max_entropy_actions(PerceptActionLoop(build_uniform(env.alphabet), env));
  CHECK(uni.holds);
  CHECK(uni.estimate == doctest::Approx(kLn2).epsilon(1e-12));
  const auto biased = has_max_entropy_actions(PerceptActionLoop(build_memoryless(env.alphabet, {0.6, 0.4}), env));
  CHECK_FALSE(biased.holds);
  CHECK(biased.estimate == doctest::Approx(h2(0.6)).epsilon(1e-12));
}

TEST_CASE("work rate is unit independent") {
  Rng rng(46);
  const PerceptActionLoop loop(random_agent(rng, 2, 2), random_environment(rng, 2, 2));
  const auto rep = work_rate(loop);
  CHECK(from_nats(rep.rate, LogBase::bits) * kLn2 == doctest::Approx(rep.rate).epsilon(1e-14));
}

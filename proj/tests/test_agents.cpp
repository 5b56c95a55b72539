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
#include <string>
#include <vector>

#include "workcap/agents.hpp"
#include "workcap/errors.hpp"
#include "workcap/loop.hpp"
#include "workcap/model_io.hpp"
#include "workcap/verification.hpp"

using namespace workcap;

namespace {

EnvironmentModel bundled(const char* name) {
  return load_environment(std::filesystem::path(WORKCAP_MODELS_DIR) / name);
}

// Law of (A_0, S_0, ..., A_{T-1}, S_{T-1}) in the loop.
std::vector<double> io_law(const PerceptActionLoop& loop, std::size_t T) {
  const auto traj = trajectory_distribution(loop, T);
  std::vector<std::string> names;
  for (std::size_t t = 0; t < T; ++t) {
    names.push_back(var_a(t));
    names.push_back(var_s(t));
  }
  return traj.joint.marginal(names).probs();
}

// A random unifilar environment: each (a, z, s) leads to one next state.
EnvironmentModel random_unifilar(Rng& rng, std::size_t A, std::size_t Z, bool product) {
  Matrix phi(A * Z, A * Z);
  std::vector<std::size_t> next(A * Z * A);
  for (auto& n : next) n = rng() % Z;
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t z = 0; z < Z; ++z) {
      const std::size_t src = product ? 0 : a;
      const auto e = random_distribution(rng, A);
      for (std::size_t s = 0; s < A; ++s) phi(a * Z + z, s * Z + next[(src * Z + z) * A + s]) = e[s];
    }
  if (product)
    for (std::size_t a = 1; a < A; ++a)
      for (std::size_t z = 0; z < Z; ++z)
        for (std::size_t c = 0; c < A * Z; ++c) phi(a * Z + z, c) = phi(z, c);
  Distribution init(Z, 0.0);
  init[0] = 1.0;
  std::vector<std::string> hidden;
  for (std::size_t z = 0; z < Z; ++z) hidden.push_back("z" + std::to_string(z));
  return make_environment(symbols(A), hidden, phi, init);
}

}  // namespace

TEST_CASE("basic agents") {
  const auto al = symbols(3);
  const auto id = build_identity(al);
  CHECK(id.n_memory() == 1);
  for (std::size_t s = 0; s < 3; ++s) CHECK(id.theta(s, 0, s, 0) == 1.0);
  CHECK(id.initial[0] == 1.0);

  const auto uni = build_uniform(al);
  CHECK(uni.theta(2, 0, 0, 0) == doctest::Approx(1.0 / 3.0));

  const auto last = build_last_action(al, {0.2, 0.3, 0.5});
  CHECK(last.n_memory() == 3);
  // Memory copies the new action.
  CHECK(last.theta(1, 1, 2, 0) == doctest::Approx(0.3));
  CHECK(last.theta(1, 2, 2, 0) == 0.0);
  CHECK_THROWS_AS(build_memoryless(al, {0.5, 0.5}), std::exception);
}

TEST_CASE("predictive agent on the golden-mean source uses the product shortcut") {
  const auto env = bundled("golden_mean.json");
  CHECK(predictive_shortcut_applies(env));
  const auto agent = build_predictive(build_uniform(env.alphabet), env);
  CHECK(agent.n_memory() == 2);
  const auto full = build_predictive(build_uniform(env.alphabet), env, PredictiveCircuit::full);
  CHECK(full.n_memory() == 1 * 2 * 2);
  // The shortcut reaches the capacity of 1 - 2/3 bit. The full circuit
  // stores the current action, so H(A|M) = 0 and its rate is minus the
  // entropy rate of the source.
  const auto rep = work_rate(PerceptActionLoop(agent, env));
  CHECK(from_nats(rep.rate, LogBase::bits) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  const auto rep_full = work_rate(PerceptActionLoop(full, env));
  CHECK(from_nats(rep_full.rate, LogBase::bits) == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("predictive agents keep the base input-output behaviour") {
  Rng rng(51);
  for (int trial = 0; trial < 6; ++trial) {
    const bool product = trial % 2 == 0;
    const auto env = random_unifilar(rng, 2, 2, product);
    REQUIRE(is_unifilar(env).has_value());
    const auto base = random_agent(rng, 2, 1 + trial % 2);
    const auto law = io_law(PerceptActionLoop(base, env), 3);
    for (auto circuit : {PredictiveCircuit::automatic, PredictiveCircuit::full}) {
      const auto pred = build_predictive(base, env, circuit);
      const auto law2 = io_law(PerceptActionLoop(pred, env), 3);
      REQUIRE(law.size() == law2.size());
      for (std::size_t i = 0; i < law.size(); ++i) CHECK(law2[i] == doctest::Approx(law[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("predictive agents are maximally predictive") {
  // Memory determines the hidden state, so no past information about the
  // next percept is left outside memory.
  Rng rng(52);
  for (int trial = 0; trial < 4; ++trial) {
    const auto env = random_unifilar(rng, 2, 2, trial % 2 == 0);
    const auto pred = build_predictive(build_uniform(env.alphabet), env);
    const auto est = am_predictiveness(PerceptActionLoop(pred, env), 3);
    for (double s : est.scores) CHECK(std::abs(s) < 1e-10);
  }
}

TEST_CASE("predictive construction needs a unifilar source") {
  const auto flip = bundled("flip_noise.json");
  CHECK_NOTHROW(build_predictive(build_uniform(flip.alphabet), flip));
  Rng rng(53);
  // A two-state source whose next state is random given (a, z, s).
  Matrix phi(4, 4, 0.25);
  const auto noisy = make_environment(symbols(2), {"x", "y"}, phi, {1.0, 0.0});
  CHECK_FALSE(is_unifilar(noisy).has_value());
  CHECK_THROWS_AS(build_predictive(build_uniform(noisy.alphabet), noisy), ClassError);
  CHECK_THROWS_AS(build_predictive(build_uniform(flip.alphabet), random_unifilar(rng, 2, 2, false),
                                   PredictiveCircuit::product_shortcut),
                  ClassError);
}

TEST_CASE("tracked hidden state equals the true one") {
  const auto env = bundled("golden_mean.json");
  const std::size_t Z = env.n_hidden();
  const auto check = [&](const AgentModel& agent) {
    const auto traj = trajectory_distribution(PerceptActionLoop(agent, env), 4);
    for (std::size_t t = 0; t < 4; ++t) {
      const auto mz = traj.joint.marginal({var_m(t), var_z(t)});
      // The tracked state is the last memory factor in both circuits.
      for (std::size_t m = 0; m < agent.n_memory(); ++m)
        for (std::size_t z = 0; z < Z; ++z)
          if (m % Z != z) CHECK(mz.probs()[m * Z + z] == 0.0);
    }
  };
  check(build_predictive(build_uniform(env.alphabet), env));
  check(build_predictive(build_uniform(env.alphabet), env, PredictiveCircuit::full));
}

TEST_CASE("predictive agents anticipate future percepts") {
  const auto env = bundled("golden_mean.json");
  const PerceptActionLoop pred(build_predictive(build_uniform(env.alphabet), env), env);
  CHECK(std::abs(future_predictiveness(pred, 1, 2)) < 1e-10);
  // A memoryless agent leaves the hidden state unresolved.
  const PerceptActionLoop uni(build_uniform(env.alphabet), env);
  CHECK(future_predictiveness(uni, 1, 1) > 1e-3);
}

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

#include "workcap/channels.hpp"
#include "workcap/errors.hpp"
#include "workcap/model_io.hpp"
#include "workcap/verification.hpp"

using namespace workcap;

namespace {

EnvironmentModel bundled(const char* name) {
  return load_environment(std::filesystem::path(WORKCAP_MODELS_DIR) / name);
}

// Binary symmetric channel with crossover e.
EnvironmentModel bsc(double e) {
  Matrix phi(2, 2);
  phi(0, 0) = phi(1, 1) = 1 - e;
  phi(0, 1) = phi(1, 0) = e;
  return make_environment(symbols(2), {"z"}, phi, {1.0});
}

}  // namespace

TEST_CASE("predicates of the bundled models") {
  const auto fig5 = bundled("fig5.json");
  CHECK(is_memoryless_invariant(fig5).has_value());
  CHECK(is_unifilar(fig5).has_value());
  CHECK_FALSE(is_product(fig5));
  CHECK_FALSE(is_noiseless(fig5));

  const auto id = bundled("identity.json");
  CHECK(is_noiseless(id));
  CHECK(is_memoryless_invariant(id).has_value());

  const auto gm = bundled("golden_mean.json");
  CHECK(is_product(gm));
  CHECK(is_unifilar(gm).has_value());
  CHECK_FALSE(is_memoryless_invariant(gm).has_value());
  const auto f = *is_unifilar(gm);
  // A emits 0 and stays, or emits 1 and moves to B; B emits 0 and returns.
  CHECK(f(0, 0, 0) == 0);
  CHECK(f(1, 0, 1) == 1);
  CHECK(f(0, 1, 0) == 0);

  const auto flip = bundled("flip_noise.json");
  CHECK_FALSE(is_product(flip));
  CHECK_FALSE(is_noiseless(flip));
}

TEST_CASE("reduced kernel of a memoryless channel") {
  const auto k = *is_memoryless_invariant(bundled("fig5.json"));
  CHECK(k(0, 0) == 1.0);
  CHECK(k(1, 0) == 0.5);
  CHECK(k(1, 1) == 0.5);
}

TEST_CASE("unreachable hidden states do not break memoryless invariance") {
  // State y is never entered and emits differently.
  Matrix phi(4, 4);
  phi(0 * 2 + 0, 0 * 2 + 0) = 1.0;
  phi(1 * 2 + 0, 1 * 2 + 0) = 1.0;
  phi(0 * 2 + 1, 1 * 2 + 1) = 1.0;
  phi(1 * 2 + 1, 0 * 2 + 1) = 1.0;
  const auto env = make_environment(symbols(2), {"x", "y"}, phi, {1.0, 0.0});
  CHECK(reachable_hidden_states(env) == std::vector<bool>{true, false});
  CHECK(is_memoryless_invariant(env).has_value());
  CHECK(is_noiseless(env));
}

TEST_CASE("validation reports offending rows") {
  Matrix phi(2, 2);
  phi(0, 0) = 0.7;
  phi(1, 1) = 1.0;
  CHECK_THROWS_AS(make_environment(symbols(2), {"z"}, phi, {1.0}), ArgumentError);
  phi(0, 1) = 0.3;
  CHECK_NOTHROW(make_environment(symbols(2), {"z"}, phi, {1.0}));
  CHECK_THROWS_AS(make_environment(symbols(2), {"z"}, phi, {0.5}), ArgumentError);
  CHECK_THROWS_AS(make_environment(symbols(2), {"z", "w"}, phi, {1.0, 0.0}), std::exception);
}

TEST_CASE("alphabet embedding pads the smaller side") {
  // Two actions, three percepts.
  Matrix phi(2, 3);
  phi(0, 0) = 1.0;
  phi(1, 1) = 0.5;
  phi(1, 2) = 0.5;
  const auto env = make_environment({"0", "1"}, {"0", "1", "2"}, {"z"}, phi, {1.0});
  CHECK(env.n_symbols() == 3);
  // The extra action copies the first action.
  CHECK(env.emission(0, 2, 0) == 1.0);
  CHECK(env.emission(2, 1, 0) == 0.5);
}

TEST_CASE("channel law is a distribution for every action sequence") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto env = random_environment(rng, 2, 1 + trial % 3);
    for (std::size_t code = 0; code < 8; ++code) {
      const std::vector<std::size_t> actions{code & 1, (code >> 1) & 1, (code >> 2) & 1};
      const auto law = channel_law(env, actions);
      CHECK(law.size() == 8);
      CHECK(std::accumulate(law.begin(), law.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("random product environments pass the product certificate") {
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    CHECK(is_product(random_environment(rng, 2, 2, RandomEnvKind::product)));
    CHECK_FALSE(is_product(random_environment(rng, 2, 2, RandomEnvKind::general)));
  }
}

TEST_CASE("product certificate respects the table budget") {
  CHECK_THROWS_AS(is_product(bundled("golden_mean.json"), 12, 100), ResourceError);
}

TEST_CASE("cascade of binary symmetric channels") {
  // Crossovers compose as e1 (1 - e2) + e2 (1 - e1).
  const auto c = cascade(bsc(0.25), bsc(0.1));
  const auto k = *is_memoryless_invariant(c);
  CHECK(k(0, 1) == doctest::Approx(0.25 * 0.9 + 0.1 * 0.75).epsilon(1e-14));
  CHECK(k(1, 0) == doctest::Approx(0.25 * 0.9 + 0.1 * 0.75).epsilon(1e-14));
  CHECK(c.hidden_states == std::vector<std::string>{"z|z"});
}

TEST_CASE("cascade with a hidden-state channel tracks both states") {
  const auto gm = bundled("golden_mean.json");
  const auto c = cascade(bsc(0.2), gm);
  CHECK(c.n_hidden() == 2);
  CHECK(validate(c).empty());
  // The golden-mean source ignores its input, so the cascade does too.
  CHECK(is_product(c));
}

TEST_CASE("delta states") {
  CHECK(delta_state({0.0, 1.0, 0.0}) == 1u);
  CHECK_FALSE(delta_state({0.5, 0.5}).has_value());
}

TEST_CASE("non-delta initial law is not unifilar") {
  Matrix phi(2, 4);
  phi(0, 0) = 1.0;
  phi(1, 3) = 1.0;
  const auto env = make_environment({"0"}, {"0", "1"}, {"x", "y"}, phi, {0.5, 0.5});
  CHECK_FALSE(is_unifilar(env).has_value());
}

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

#include "workcap/errors.hpp"
#include "workcap/info.hpp"
#include "workcap/model_io.hpp"
#include "workcap/verification.hpp"

using namespace workcap;

namespace {

const double kLn2 = std::log(2.0);

// X, Y uniform and independent, Z = X xor Y.
JointTable xor_table() {
  std::vector<double> p(8, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) p[(x * 2 + y) * 2 + (x ^ y)] = 0.25;
  return JointTable({{"X", 2}, {"Y", 2}, {"Z", 2}}, p);
}

JointTable random_table(Rng& rng) {
  const std::size_t a = 2 + rng() % 2, b = 2 + rng() % 2, c = 1 + rng() % 3;
  return JointTable({{"X", a}, {"Y", b}, {"Z", c}}, random_distribution(rng, a * b * c));
}

}  // namespace

TEST_CASE("entropy of simple laws") {
  CHECK(shannon_entropy(std::vector<double>{1.0, 0.0}) == 0.0);
  CHECK(shannon_entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == doctest::Approx(std::log(4.0)));
  const JointTable t({{"X", 2}}, {0.5, 0.5});
  CHECK(entropy(t, {"X"}, LogBase::bits) == doctest::Approx(1.0));
  CHECK(from_nats(kLn2, LogBase::bits) == doctest::Approx(1.0));
  CHECK(to_nats(1.0, LogBase::bits) == doctest::Approx(kLn2));
}

TEST_CASE("joint table validation") {
  CHECK_THROWS_AS(JointTable({{"X", 2}}, {0.5, 0.6}), ArgumentError);
  CHECK_THROWS_AS(JointTable({{"X", 2}}, {1.0}), ArgumentError);
  CHECK_THROWS_AS(JointTable({{"X", 2}, {"X", 2}}, {0.25, 0.25, 0.25, 0.25}), ArgumentError);
  const auto t = xor_table();
  CHECK_THROWS_AS(entropy(t, {"Q"}), KeyError);
  CHECK_THROWS_AS(mutual_information(t, {"X"}, {"X"}), ArgumentError);
}

TEST_CASE("xor: pairwise independent, jointly dependent") {
  const auto t = xor_table();
  CHECK(mutual_information(t, {"X"}, {"Y"}) == doctest::Approx(0.0));
  CHECK(conditional_mutual_information(t, {"X"}, {"Y"}, {"Z"}) == doctest::Approx(kLn2));
  CHECK(interaction_information(t, {"X"}, {"Y"}, {"Z"}) == doctest::Approx(-kLn2));
  CHECK(conditional_entropy(t, {"Z"}, {"X", "Y"}) == doctest::Approx(0.0));
}

TEST_CASE("marginal order follows the requested names") {
  const JointTable t({{"X", 2}, {"Y", 3}}, {0.1, 0.2, 0.05, 0.3, 0.15, 0.2});
  const auto m = t.marginal({"Y", "X"});
  CHECK(m.variables()[0].name == "Y");
  CHECK(m.probs()[0 * 2 + 1] == doctest::Approx(0.3));
  CHECK(m.probs()[2 * 2 + 0] == doctest::Approx(0.05));
}

TEST_CASE("identities on random joint tables") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_table(rng);
    // Chain rule.
    CHECK(entropy(t, {"X", "Y"}) ==
          doctest::Approx(entropy(t, {"X"}) + conditional_entropy(t, {"Y"}, {"X"})).epsilon(1e-12));
    // Nonnegativity and symmetry.
    const double i_xy = mutual_information(t, {"X"}, {"Y"});
    CHECK(i_xy >= 0.0);
    CHECK(i_xy == doctest::Approx(mutual_information(t, {"Y"}, {"X"})).epsilon(1e-12));
    const double cmi = conditional_mutual_information(t, {"X"}, {"Y"}, {"Z"});
    CHECK(cmi >= 0.0);
    // I[X; Y Z] = I[X; Z] + I[X; Y | Z].
    CHECK(mutual_information(t, {"X"}, {"Y", "Z"}) ==
          doctest::Approx(mutual_information(t, {"X"}, {"Z"}) + cmi).epsilon(1e-10));
    // Bounds.
    CHECK(i_xy <= std::min(entropy(t, {"X"}), entropy(t, {"Y"})) + 1e-12);
    CHECK(entropy(t, {"X", "Y", "Z"}) <= std::log(static_cast<double>(t.probs().size())) + 1e-12);
    // Units.
    CHECK(entropy(t, {"X"}, LogBase::bits) == doctest::Approx(entropy(t, {"X"}) / kLn2).epsilon(1e-12));
  }
}

TEST_CASE("product laws have zero mutual information") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto px = random_distribution(rng, 3), py = random_distribution(rng, 4);
    std::vector<double> p;
    for (double x : px)
      for (double y : py) p.push_back(x * y);
    const JointTable t({{"X", 3}, {"Y", 4}}, p);
    CHECK(mutual_information(t, {"X"}, {"Y"}) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("golden-mean entropy rate") {
  const auto env = load_environment(std::filesystem::path(WORKCAP_MODELS_DIR) / "golden_mean.json");
  // State A emits a fair bit and B a deterministic one; the hidden chain
  // spends 2/3 of the time in A.
  CHECK(entropy_rate(env, {}, LogBase::bits) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(block_entropy_rate(env, {}, LogBase::bits) == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
  // H(S0) = 1 bit, H(S0 S1) = 1.5 bits.
  CHECK(block_entropy(env, 1) == doctest::Approx(kLn2));
  CHECK(block_entropy(env, 2) == doctest::Approx(1.5 * kLn2));
}

TEST_CASE("entropy rate of memoryless sources") {
  const auto env = load_environment(std::filesystem::path(WORKCAP_MODELS_DIR) / "flip_noise.json");
  // Percepts depend on the action, so the source is not product.
  CHECK_THROWS_AS(entropy_rate(env), ClassError);

  Rng rng(13);
  const auto src = random_environment(rng, 3, 1, RandomEnvKind::product);
  const double h = shannon_entropy(src.kernel.row(0));
  CHECK(entropy_rate(src) == doctest::Approx(h).epsilon(1e-12));
  EntropyRateOptions blocks;
  blocks.force_blocks = true;
  CHECK(entropy_rate(src, blocks) == doctest::Approx(h).epsilon(1e-9));
}

TEST_CASE("block-entropy rate of random binary Markov sources") {
  // The hidden state is the last percept, so the rate is
  // sum_z pi(z) H(P(z, .)) with pi the stationary law of P.
  Rng rng(14);
  for (int trial = 0; trial < 5; ++trial) {
    const double p01 = 0.4 + 0.2 * std::uniform_real_distribution<double>(0, 1)(rng);
    const double p10 = 0.4 + 0.2 * std::uniform_real_distribution<double>(0, 1)(rng);
    Matrix phi(4, 4);
    for (std::size_t a = 0; a < 2; ++a) {
      phi(a * 2 + 0, 0 * 2 + 0) = 1 - p01;
      phi(a * 2 + 0, 1 * 2 + 1) = p01;
      phi(a * 2 + 1, 0 * 2 + 0) = p10;
      phi(a * 2 + 1, 1 * 2 + 1) = 1 - p10;
    }
    const auto src = make_environment(symbols(2), {"z0", "z1"}, phi, {1.0, 0.0});
    const double pi0 = p10 / (p01 + p10);
    const double expected = pi0 * shannon_entropy(std::vector<double>{1 - p01, p01}) +
                            (1 - pi0) * shannon_entropy(std::vector<double>{p10, 1 - p10});
    CHECK(entropy_rate(src) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(block_entropy_rate(src) == doctest::Approx(expected).epsilon(1e-7));
  }
}

TEST_CASE("block enumeration respects the budget") {
  Rng rng(15);
  const auto src = random_environment(rng, 3, 2, RandomEnvKind::product);
  CHECK_THROWS_AS(block_entropy(src, 12, 1000), ResourceError);
}

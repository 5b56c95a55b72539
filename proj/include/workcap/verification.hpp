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

// Acceptance criteria and random model generators. Shared by the
// acceptance test binary and `workcap verify`.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "workcap/channels.hpp"
#include "workcap/info.hpp"

#ifndef WORKCAP_MODELS_DIR
#define WORKCAP_MODELS_DIR "models"
#endif

namespace workcap {

using Rng = std::mt19937_64;

/// Row-stochastic matrix with Dirichlet(1) rows. With `sparsity` > 0 each
/// entry is dropped with that probability; every row keeps at least one.
Matrix random_stochastic(Rng& rng, std::size_t rows, std::size_t cols, double sparsity = 0.0);

/// Random point of the simplex, Dirichlet(1).
Distribution random_distribution(Rng& rng, std::size_t n);

enum class RandomEnvKind {
  general,
  /// One hidden state.
  memoryless,
  /// Kernel rows do not depend on the action.
  product,
};

EnvironmentModel random_environment(Rng& rng, std::size_t n_symbols, std::size_t n_hidden,
                                    RandomEnvKind kind = RandomEnvKind::general);
AgentModel random_agent(Rng& rng, std::size_t n_symbols, std::size_t n_memory);

/// Random square kernel on n states. Roughly one in four is built with a
/// cyclic class structure so that periodic chains are exercised.
TransitionKernel random_chain(Rng& rng, std::size_t n);

/// Symbol labels "0", "1", ...
std::vector<std::string> symbols(std::size_t n);

struct VerifyConfig {
  double tol = 1e-9;
  LogBase units = LogBase::bits;
  std::uint64_t seed = 0;
  std::filesystem::path models_dir = WORKCAP_MODELS_DIR;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

CriterionResult criterion_fig5_capacity(const VerifyConfig& cfg);
CriterionResult criterion_fig5_uniform_rate(const VerifyConfig& cfg);
CriterionResult criterion_identity_noiseless(const VerifyConfig& cfg);
CriterionResult criterion_golden_mean(const VerifyConfig& cfg);
CriterionResult criterion_mutual_exclusivity(const VerifyConfig& cfg);
CriterionResult criterion_global_markov(const VerifyConfig& cfg);
CriterionResult criterion_cesaro(const VerifyConfig& cfg);
CriterionResult criterion_subadditivity(const VerifyConfig& cfg);
CriterionResult criterion_dseparation(const VerifyConfig& cfg);

/// All criteria in order. Exceptions inside a criterion become a FAIL with
/// the message as detail.
std::vector<CriterionResult> run_acceptance(const VerifyConfig& cfg);

/// "PASS  1  name  (0.012 s)  detail"
std::string format_result(const CriterionResult& r);

}  // namespace workcap

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

// Shannon measures over explicit joint tables. Everything is computed in
// nats and converted on return.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "workcap/channels.hpp"

namespace workcap {

enum class LogBase { bits, nats };

/// Converts a value in nats to `base`.
double from_nats(double nats, LogBase base) noexcept;
/// Converts a value in `base` to nats.
double to_nats(double value, LogBase base) noexcept;
const char* unit_name(LogBase base) noexcept;

struct Variable {
  std::string name;
  std::size_t cardinality;
};

/// Probability table over the product of the variables' alphabets, with the
/// last variable varying fastest.
class JointTable {
 public:
  /// Throws ArgumentError on duplicate names, a zero cardinality, a size
  /// mismatch, negative entries, or a total off one by more than 1e-10.
  JointTable(std::vector<Variable> variables, std::vector<double> probs);

  const std::vector<Variable>& variables() const noexcept { return vars_; }
  const std::vector<double>& probs() const noexcept { return probs_; }

  /// Position of a variable; KeyError if absent.
  std::size_t index_of(const std::string& name) const;

  /// Marginal over `names` in the given order. Duplicates are an
  /// ArgumentError, unknown names a KeyError.
  JointTable marginal(const std::vector<std::string>& names) const;

 private:
  std::vector<Variable> vars_;
  std::vector<double> probs_;
};

/// -sum p ln p over the nonzero entries, in nats.
double shannon_entropy(std::span<const double> p);

double entropy(const JointTable& joint, const std::vector<std::string>& vars, LogBase base = LogBase::nats);

/// H(target | given) = H(target, given) - H(given).
double conditional_entropy(const JointTable& joint, const std::vector<std::string>& target,
                           const std::vector<std::string>& given, LogBase base = LogBase::nats);

/// Values in [-1e-9, 0) are treated as rounding and clamped to zero; values
/// below -1e-9 raise InternalConsistencyError.
double conditional_mutual_information(const JointTable& joint, const std::vector<std::string>& a,
                                      const std::vector<std::string>& b, const std::vector<std::string>& c,
                                      LogBase base = LogBase::nats);

double mutual_information(const JointTable& joint, const std::vector<std::string>& a,
                          const std::vector<std::string>& b, LogBase base = LogBase::nats);

/// I[A;B;C] = I[A;B] - I[A;B|C]; may be negative.
double interaction_information(const JointTable& joint, const std::vector<std::string>& a,
                               const std::vector<std::string>& b, const std::vector<std::string>& c,
                               LogBase base = LogBase::nats);

/// Joint entropy of the first n percepts of a source, in nats. Percept
/// prefixes of probability zero are pruned. Throws ResourceError when more
/// than `budget` prefixes would be visited.
double block_entropy(const EnvironmentModel& source, std::size_t n, std::size_t budget = 100'000'000);

struct EntropyRateOptions {
  double tol = 1e-9;
  std::size_t max_horizon = 64;
  std::size_t budget = 100'000'000;
  /// Force the block-difference route even when the closed form applies.
  bool force_blocks = false;
};

/// Entropy rate of the percept process of a product environment. Unifilar
/// sources use sum_z pi(z) H(S | z) with pi the time-averaged hidden-state
/// distribution; other sources use H(S_{0:n+1}) - H(S_{0:n}) until successive
/// estimates differ by less than tol. Throws ClassError for non-product
/// environments and ConvergenceError carrying the last two estimates.
double entropy_rate(const EnvironmentModel& source, const EntropyRateOptions& opts = {},
                    LogBase base = LogBase::nats);

/// Block-difference route only; see entropy_rate.
double block_entropy_rate(const EnvironmentModel& source, const EntropyRateOptions& opts = {},
                          LogBase base = LogBase::nats);

}  // namespace workcap

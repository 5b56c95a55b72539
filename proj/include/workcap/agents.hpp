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

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "workcap/channels.hpp"

namespace workcap {

/// One memory state; the next action copies the last percept. The first
/// action is `initial_action`.
AgentModel build_identity(const std::vector<std::string>& alphabet, std::size_t initial_action = 0);

/// One memory state; every action is drawn from p.
AgentModel build_memoryless(const std::vector<std::string>& alphabet, const Distribution& p);

/// Memoryless with uniform p.
AgentModel build_uniform(const std::vector<std::string>& alphabet);

/// Memory holds the current action. Actions after the first are drawn from p
/// regardless of the percept; the first is `initial_action`.
AgentModel build_last_action(const std::vector<std::string>& alphabet, const Distribution& p,
                             std::size_t initial_action = 0);

enum class PredictiveCircuit {
  /// Product shortcut when it applies, full circuit otherwise.
  automatic,
  /// Memory M' x Y' x Z': base memory, previous action, tracked hidden state.
  full,
  /// Memory M' x Z' for sources whose state update ignores the action.
  product_shortcut,
};

/// Extends `base` with a copy of the environment's hidden state, tracked
/// through the unifilarity map. The extended agent has the same input-output
/// behaviour as `base`. Throws ClassError for non-unifilar environments, and
/// for `product_shortcut` when the environment is not a product channel with
/// an action-independent state update.
AgentModel build_predictive(const AgentModel& base, const EnvironmentModel& env,
                            PredictiveCircuit circuit = PredictiveCircuit::automatic);

/// Whether build_predictive(automatic) would use the product shortcut.
bool predictive_shortcut_applies(const EnvironmentModel& env);

}  // namespace workcap

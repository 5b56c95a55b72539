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

// JSON model files.
//
//   {
//     "alphabet": ["0", "1"],
//     "hidden_states": ["z"],            // or "memory_states" for agents
//     "initial": {"z": "1"},             // agents: {"action,memory": p}
//     "transitions": {"input,state": {"output,next_state": "0.5", ...}, ...}
//   }
//
// Probabilities may be decimal strings or JSON numbers. Labels are sorted on
// load to fix indices. Rows off by more than 1e-12 but less than 1e-9 are
// renormalized; larger deviations are rejected. Saved files list zero-free
// rows with probabilities printed to 17 significant digits, so a saved model
// reloads to the same doubles.

#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "workcap/channels.hpp"

namespace workcap {

EnvironmentModel parse_environment(const std::string& text);
AgentModel parse_agent(const std::string& text);
/// Dispatches on the presence of `hidden_states` or `memory_states`.
std::variant<EnvironmentModel, AgentModel> parse_model(const std::string& text);

EnvironmentModel load_environment(const std::filesystem::path& path);
AgentModel load_agent(const std::filesystem::path& path);

std::string to_json(const EnvironmentModel& env);
std::string to_json(const AgentModel& agent);

void save(const EnvironmentModel& env, const std::filesystem::path& path);
void save(const AgentModel& agent, const std::filesystem::path& path);

}  // namespace workcap

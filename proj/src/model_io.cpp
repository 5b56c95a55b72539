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

#include "workcap/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "workcap/errors.hpp"

namespace workcap {

using nlohmann::json;

namespace {

constexpr double kRenormalize = 1e-12;
constexpr double kReject = 1e-9;

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

double parse_prob(const json& v, const std::string& where) {
  double p = 0.0;
  if (v.is_number()) {
    p = v.get<double>();
  } else if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, p);
    if (ec != std::errc() || ptr != end) throw ParseError(where + ": cannot parse probability \"" + s + "\"");
  } else {
    throw ParseError(where + ": probability must be a string or a number");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw ParseError(where + ": probability outside [0, 1]");
  return p;
}

std::vector<std::string> label_list(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) throw ParseError(std::string("missing list \"") + key + "\"");
  std::vector<std::string> out;
  for (const auto& v : doc[key]) {
    if (!v.is_string()) throw ParseError(std::string("entries of \"") + key + "\" must be strings");
    const auto& s = v.get_ref<const std::string&>();
    if (s.empty() || s.find(',') != std::string::npos)
      throw ParseError(std::string("label \"") + s + "\" in \"" + key + "\" is empty or contains a comma");
    out.push_back(s);
  }
  if (out.empty()) throw ParseError(std::string("\"") + key + "\" is empty");
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw ParseError(std::string("duplicate label in \"") + key + "\"");
  return out;
}

std::size_t position(const std::vector<std::string>& labels, const std::string& l, const std::string& where) {
  auto it = std::lower_bound(labels.begin(), labels.end(), l);
  if (it == labels.end() || *it != l) throw ParseError(where + ": unknown label \"" + l + "\"");
  return static_cast<std::size_t>(it - labels.begin());
}

// "x,y" -> (index of x in first, index of y in second)
std::pair<std::size_t, std::size_t> split_key(const std::string& key, const std::vector<std::string>& first,
                                              const std::vector<std::string>& second) {
  const auto comma = key.find(',');
  if (comma == std::string::npos || key.find(',', comma + 1) != std::string::npos)
    throw ParseError("key \"" + key + "\" must have the form \"symbol,state\"");
  return {position(first, key.substr(0, comma), "key \"" + key + "\""),
          position(second, key.substr(comma + 1), "key \"" + key + "\"")};
}

void normalize(std::span<double> row, const std::string& where) {
  double sum = 0.0;
  for (double x : row) sum += x;
  const double dev = std::abs(sum - 1.0);
  if (dev > kReject) {
    std::ostringstream os;
    os << where << ": probabilities sum to " << sum;
    throw ParseError(os.str());
  }
  if (dev > kRenormalize)
    for (double& x : row) x /= sum;
}

// Shared reader: symbols x states -> symbols x states.
Matrix read_transitions(const json& doc, const std::vector<std::string>& symbols,
                        const std::vector<std::string>& states) {
  if (!doc.contains("transitions") || !doc["transitions"].is_object())
    throw ParseError("missing object \"transitions\"");
  const std::size_t n = symbols.size() * states.size();
  Matrix m(n, n);
  std::vector<bool> seen(n, false);
  for (const auto& [key, row] : doc["transitions"].items()) {
    const auto [x, q] = split_key(key, symbols, states);
    const std::size_t r = x * states.size() + q;
    seen[r] = true;
    if (!row.is_object()) throw ParseError("transitions[\"" + key + "\"] must be an object");
    for (const auto& [okey, val] : row.items()) {
      const auto [y, qn] = split_key(okey, symbols, states);
      m(r, y * states.size() + qn) = parse_prob(val, "transitions[\"" + key + "\"][\"" + okey + "\"]");
    }
    normalize(m.row(r), "transitions[\"" + key + "\"]");
  }
  for (std::size_t r = 0; r < n; ++r)
    if (!seen[r])
      throw ParseError("transitions: missing row \"" + symbols[r / states.size()] + "," +
                       states[r % states.size()] + "\"");
  return m;
}

std::string format_prob(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

json write_transitions(const Matrix& m, const std::vector<std::string>& symbols,
                       const std::vector<std::string>& states) {
  json t = json::object();
  const std::size_t Q = states.size();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::object();
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m(r, c) != 0.0) row[symbols[c / Q] + "," + states[c % Q]] = format_prob(m(r, c));
    t[symbols[r / Q] + "," + states[r % Q]] = std::move(row);
  }
  return t;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << text;
}

template <class Model>
void require_valid(const Model& m) {
  if (auto v = validate(m); !v.empty()) {
    std::string msg = "invalid model:";
    for (const auto& s : v) msg += " " + s + ";";
    throw ParseError(msg);
  }
}

}  // namespace

EnvironmentModel parse_environment(const std::string& text) {
  const json doc = parse_text(text);
  if (!doc.is_object()) throw ParseError("model must be a JSON object");
  const auto alphabet = label_list(doc, "alphabet");
  const auto hidden = label_list(doc, "hidden_states");
  Matrix phi = read_transitions(doc, alphabet, hidden);
  if (!doc.contains("initial") || !doc["initial"].is_object()) throw ParseError("missing object \"initial\"");
  Distribution init(hidden.size(), 0.0);
  for (const auto& [key, val] : doc["initial"].items())
    init[position(hidden, key, "initial")] = parse_prob(val, "initial[\"" + key + "\"]");
  normalize(init, "initial");
  EnvironmentModel env{alphabet, hidden, TransitionKernel::unchecked(std::move(phi)), std::move(init)};
  require_valid(env);
  return env;
}

AgentModel parse_agent(const std::string& text) {
  const json doc = parse_text(text);
  if (!doc.is_object()) throw ParseError("model must be a JSON object");
  const auto alphabet = label_list(doc, "alphabet");
  const auto memory = label_list(doc, "memory_states");
  Matrix theta = read_transitions(doc, alphabet, memory);
  if (!doc.contains("initial") || !doc["initial"].is_object()) throw ParseError("missing object \"initial\"");
  Distribution init(alphabet.size() * memory.size(), 0.0);
  for (const auto& [key, val] : doc["initial"].items()) {
    const auto [a, m] = split_key(key, alphabet, memory);
    init[a * memory.size() + m] = parse_prob(val, "initial[\"" + key + "\"]");
  }
  normalize(init, "initial");
  AgentModel agent{alphabet, memory, TransitionKernel::unchecked(std::move(theta)), std::move(init)};
  require_valid(agent);
  return agent;
}

std::variant<EnvironmentModel, AgentModel> parse_model(const std::string& text) {
  const json doc = parse_text(text);
  if (doc.is_object() && doc.contains("hidden_states")) return parse_environment(text);
  if (doc.is_object() && doc.contains("memory_states")) return parse_agent(text);
  throw ParseError("model has neither \"hidden_states\" nor \"memory_states\"");
}

EnvironmentModel load_environment(const std::filesystem::path& path) {
  try {
    return parse_environment(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

AgentModel load_agent(const std::filesystem::path& path) {
  try {
    return parse_agent(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string to_json(const EnvironmentModel& env) {
  json doc;
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  doc["alphabet"] = sorted(env.alphabet);
  doc["hidden_states"] = sorted(env.hidden_states);
  json init = json::object();
  for (std::size_t z = 0; z < env.n_hidden(); ++z)
    if (env.initial[z] != 0.0) init[env.hidden_states[z]] = format_prob(env.initial[z]);
  doc["initial"] = std::move(init);
  doc["transitions"] = write_transitions(env.kernel.matrix(), env.alphabet, env.hidden_states);
  return doc.dump(2) + "\n";
}

std::string to_json(const AgentModel& agent) {
  json doc;
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  doc["alphabet"] = sorted(agent.alphabet);
  doc["memory_states"] = sorted(agent.memory_states);
  json init = json::object();
  const std::size_t M = agent.n_memory();
  for (std::size_t i = 0; i < agent.initial.size(); ++i)
    if (agent.initial[i] != 0.0)
      init[agent.alphabet[i / M] + "," + agent.memory_states[i % M]] = format_prob(agent.initial[i]);
  doc["initial"] = std::move(init);
  doc["transitions"] = write_transitions(agent.kernel.matrix(), agent.alphabet, agent.memory_states);
  return doc.dump(2) + "\n";
}

void save(const EnvironmentModel& env, const std::filesystem::path& path) { write_file(path, to_json(env)); }
void save(const AgentModel& agent, const std::filesystem::path& path) { write_file(path, to_json(agent)); }

}  // namespace workcap

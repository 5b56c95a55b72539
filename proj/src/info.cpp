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

#include "workcap/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "workcap/errors.hpp"

namespace workcap {

double from_nats(double nats, LogBase base) noexcept {
  return base == LogBase::bits ? nats / std::numbers::ln2 : nats;
}

double to_nats(double value, LogBase base) noexcept {
  return base == LogBase::bits ? value * std::numbers::ln2 : value;
}

const char* unit_name(LogBase base) noexcept { return base == LogBase::bits ? "bits" : "nats"; }

JointTable::JointTable(std::vector<Variable> variables, std::vector<double> probs)
    : vars_(std::move(variables)), probs_(std::move(probs)) {
  std::set<std::string> seen;
  std::size_t size = 1;
  for (const auto& v : vars_) {
    if (!seen.insert(v.name).second) throw ArgumentError("duplicate variable " + v.name);
    if (v.cardinality == 0) throw ArgumentError("variable " + v.name + " has an empty alphabet");
    size *= v.cardinality;
  }
  if (probs_.size() != size)
    throw ArgumentError("joint table has " + std::to_string(probs_.size()) + " entries, expected " +
                        std::to_string(size));
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw ArgumentError("joint table has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10) throw ArgumentError("joint table sums to " + std::to_string(sum));
}

std::size_t JointTable::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return i;
  throw KeyError("unknown variable " + name);
}

JointTable JointTable::marginal(const std::vector<std::string>& names) const {
  const std::size_t k = vars_.size();
  // Stride of each source variable inside the marginal index; zero if summed out.
  std::vector<std::size_t> target_stride(k, 0);
  std::vector<Variable> out_vars;
  std::size_t out_size = 1;
  std::vector<std::size_t> picked;
  for (const auto& n : names) {
    const std::size_t i = index_of(n);
    if (std::find(picked.begin(), picked.end(), i) != picked.end())
      throw ArgumentError("variable " + n + " listed twice");
    picked.push_back(i);
    out_vars.push_back(vars_[i]);
  }
  for (std::size_t j = picked.size(); j-- > 0;) {
    target_stride[picked[j]] = out_size;
    out_size *= vars_[picked[j]].cardinality;
  }
  std::vector<double> out(out_size, 0.0);
  std::vector<std::size_t> digit(k, 0);
  std::size_t target = 0;
  for (std::size_t idx = 0; idx < probs_.size(); ++idx) {
    out[target] += probs_[idx];
    // Odometer increment with the last variable fastest.
    for (std::size_t v = k; v-- > 0;) {
      if (++digit[v] < vars_[v].cardinality) {
        target += target_stride[v];
        break;
      }
      target -= target_stride[v] * (vars_[v].cardinality - 1);
      digit[v] = 0;
    }
  }
  // Bypass the constructor check: marginals of a valid table stay valid.
  JointTable m({}, {1.0});
  m.vars_ = std::move(out_vars);
  m.probs_ = std::move(out);
  return m;
}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

double entropy(const JointTable& joint, const std::vector<std::string>& vars, LogBase base) {
  if (vars.empty()) return 0.0;
  return from_nats(shannon_entropy(joint.marginal(vars).probs()), base);
}

namespace {

void require_disjoint(const std::vector<const std::vector<std::string>*>& sets) {
  std::set<std::string> seen;
  for (const auto* s : sets)
    for (const auto& n : *s)
      if (!seen.insert(n).second) throw ArgumentError("variable " + n + " appears in more than one set");
}

std::vector<std::string> concat(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

double h(const JointTable& joint, const std::vector<std::string>& vars) { return entropy(joint, vars); }

}  // namespace

double conditional_entropy(const JointTable& joint, const std::vector<std::string>& target,
                           const std::vector<std::string>& given, LogBase base) {
  require_disjoint({&target, &given});
  const double v = h(joint, concat(target, given)) - h(joint, given);
  return from_nats(std::max(v, 0.0), base);
}

double conditional_mutual_information(const JointTable& joint, const std::vector<std::string>& a,
                                      const std::vector<std::string>& b, const std::vector<std::string>& c,
                                      LogBase base) {
  require_disjoint({&a, &b, &c});
  const double v = h(joint, concat(a, c)) + h(joint, concat(b, c)) - h(joint, concat(concat(a, b), c)) - h(joint, c);
  if (v < -1e-9) throw InternalConsistencyError("conditional mutual information is " + std::to_string(v));
  return from_nats(std::max(v, 0.0), base);
}

double mutual_information(const JointTable& joint, const std::vector<std::string>& a,
                          const std::vector<std::string>& b, LogBase base) {
  return conditional_mutual_information(joint, a, b, {}, base);
}

double interaction_information(const JointTable& joint, const std::vector<std::string>& a,
                               const std::vector<std::string>& b, const std::vector<std::string>& c,
                               LogBase base) {
  require_disjoint({&a, &b, &c});
  return mutual_information(joint, a, b, base) - conditional_mutual_information(joint, a, b, c, base);
}

namespace {

// Block entropies H(S_{0:n}) for n = 0..depth under the constant action 0.
std::vector<double> block_entropies(const EnvironmentModel& env, std::size_t depth, std::size_t budget) {
  const std::size_t S = env.n_symbols(), Z = env.n_hidden();
  std::vector<double> H(depth + 1, 0.0);
  std::vector<std::vector<double>> alpha(depth + 1, std::vector<double>(Z));
  alpha[0] = env.initial;
  std::size_t visited = 0;
  auto recurse = [&](auto&& self, std::size_t t) -> void {
    if (t == depth) return;
    for (std::size_t s = 0; s < S; ++s) {
      auto& next = alpha[t + 1];
      std::fill(next.begin(), next.end(), 0.0);
      double mass = 0.0;
      for (std::size_t z = 0; z < Z; ++z) {
        const double w = alpha[t][z];
        if (w == 0.0) continue;
        for (std::size_t zn = 0; zn < Z; ++zn) {
          const double v = w * env.phi(s, zn, 0, z);
          next[zn] += v;
          mass += v;
        }
      }
      if (mass <= 0.0) continue;
      if (++visited > budget) throw ResourceError("block entropy: prefix budget exhausted", visited);
      H[t + 1] -= mass * std::log(mass);
      self(self, t + 1);
    }
  };
  recurse(recurse, 0);
  return H;
}

void require_product(const EnvironmentModel& env) {
  if (!is_product(env)) throw ClassError("entropy rate requires a product environment");
}

}  // namespace

double block_entropy(const EnvironmentModel& source, std::size_t n, std::size_t budget) {
  return block_entropies(source, n, budget)[n];
}

double block_entropy_rate(const EnvironmentModel& source, const EntropyRateOptions& opts, LogBase base) {
  require_product(source);
  double last = std::numeric_limits<double>::quiet_NaN();
  double prev = last;
  for (std::size_t depth = 8;; depth = std::min(2 * depth, opts.max_horizon)) {
    std::vector<double> H;
    try {
      H = block_entropies(source, depth, opts.budget);
    } catch (const ResourceError&) {
      throw ConvergenceError("entropy rate: block estimates did not settle before the prefix budget ran out",
                             from_nats(last, base), from_nats(prev, base));
    }
    for (std::size_t n = 1; n < depth; ++n) {
      const double a = H[n] - H[n - 1];
      const double b = H[n + 1] - H[n];
      prev = a;
      last = b;
      if (std::abs(b - a) < opts.tol) return from_nats(b, base);
    }
    if (depth >= opts.max_horizon)
      throw ConvergenceError("entropy rate: block estimates did not settle within the maximum horizon",
                             from_nats(last, base), from_nats(prev, base));
  }
}

double entropy_rate(const EnvironmentModel& source, const EntropyRateOptions& opts, LogBase base) {
  require_product(source);
  if (opts.force_blocks || !is_unifilar(source)) return block_entropy_rate(source, opts, base);
  const std::size_t S = source.n_symbols(), Z = source.n_hidden();
  Matrix q(Z, Z);
  for (std::size_t z = 0; z < Z; ++z)
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t zn = 0; zn < Z; ++zn) q(z, zn) += source.phi(s, zn, 0, z);
  const auto prof = asymptotic_profile(TransitionKernel::unchecked(std::move(q)));
  const auto pi = propagate(source.initial, prof.cesaro);
  double rate = 0.0;
  std::vector<double> e(S);
  for (std::size_t z = 0; z < Z; ++z) {
    if (pi[z] == 0.0) continue;
    for (std::size_t s = 0; s < S; ++s) e[s] = source.emission(s, 0, z);
    rate += pi[z] * shannon_entropy(e);
  }
  return from_nats(rate, base);
}

}  // namespace workcap

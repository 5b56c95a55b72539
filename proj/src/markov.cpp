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

#include "workcap/markov.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "workcap/errors.hpp"

namespace workcap {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix sum: shapes differ");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (double& x : c.row(i)) x *= s;
  return c;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_abs_diff: shapes differ");
  double m = 0.0;
  const auto& x = a.data();
  const auto& y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

std::vector<double> propagate(std::span<const double> p, const Matrix& m) {
  if (p.size() != m.rows()) throw DimensionError("propagate: vector length differs from row count");
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    auto r = m.row(i);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += p[i] * r[j];
  }
  return out;
}

TransitionKernel::TransitionKernel(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() == 0 || probs_.cols() == 0) throw DimensionError("transition kernel must be nonempty");
  for (std::size_t i = 0; i < probs_.rows(); ++i) {
    double sum = 0.0;
    for (double x : probs_.row(i)) {
      if (!(x >= 0.0 && x <= 1.0))
        throw ArgumentError("transition kernel row " + std::to_string(i) + " has an entry outside [0, 1]");
      sum += x;
    }
    if (std::abs(sum - 1.0) > kRowTolerance)
      throw ArgumentError("transition kernel row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }
}

TransitionKernel TransitionKernel::unchecked(Matrix probs) {
  TransitionKernel k;
  k.probs_ = std::move(probs);
  return k;
}

void check_distribution(std::span<const double> p, double tol) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw ArgumentError("distribution has a negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol) throw ArgumentError("distribution sums to " + std::to_string(sum));
}

Matrix matrix_power(const Matrix& k, std::size_t n) {
  if (k.rows() != k.cols()) throw DimensionError("matrix_power: matrix is not square");
  Matrix result = Matrix::identity(k.rows());
  Matrix base = k;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

namespace {

void require_square(const TransitionKernel& kernel, const char* op) {
  if (!kernel.square())
    throw DimensionError(std::string(op) + ": kernel is " + std::to_string(kernel.n_in()) + "x" +
                         std::to_string(kernel.n_out()) + ", expected square");
}

// Tarjan's algorithm, iterative to avoid deep recursion on long chains.
std::vector<std::vector<std::size_t>> strongly_connected_components(const TransitionKernel& k) {
  const std::size_t n = k.n_in();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> comps;
  std::size_t counter = 0;

  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const std::size_t v = f.v;
      if (f.next < n) {
        const std::size_t w = f.next++;
        if (k(v, w) <= 0.0) continue;
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

// Period of a strongly connected component by BFS level-colouring: the gcd of
// level[u] + 1 - level[v] over all internal edges u -> v. Returns 0 for a
// singleton without a self-loop.
std::size_t component_period(const TransitionKernel& k, const std::vector<std::size_t>& comp,
                             const std::vector<std::size_t>& class_of) {
  const std::size_t n = k.n_in();
  const std::size_t id = class_of[comp.front()];
  constexpr long kUnseen = -1;
  std::vector<long> level(n, kUnseen);
  std::deque<std::size_t> queue{comp.front()};
  level[comp.front()] = 0;
  std::size_t g = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v) {
      if (k(u, v) <= 0.0 || class_of[v] != id) continue;
      if (level[v] == kUnseen) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      } else {
        const long diff = level[u] + 1 - level[v];
        g = std::gcd(g, static_cast<std::size_t>(std::abs(diff)));
      }
    }
  }
  return g;
}

}  // namespace

StateClassification classify_states(const TransitionKernel& kernel) {
  require_square(kernel, "classify_states");
  const std::size_t n = kernel.n_in();
  StateClassification out;
  out.classes = strongly_connected_components(kernel);
  out.class_of.assign(n, 0);
  for (std::size_t c = 0; c < out.classes.size(); ++c)
    for (std::size_t s : out.classes[c]) out.class_of[s] = c;
  out.recurrent.assign(n, false);
  for (const auto& comp : out.classes) {
    bool closed = true;
    for (std::size_t u : comp) {
      for (std::size_t v = 0; v < n && closed; ++v)
        if (kernel(u, v) > 0.0 && out.class_of[v] != out.class_of[u]) closed = false;
      if (!closed) break;
    }
    for (std::size_t u : comp) out.recurrent[u] = closed;
  }
  return out;
}

std::vector<bool> reachable_from(const TransitionKernel& kernel, std::span<const double> from) {
  require_square(kernel, "reachable_from");
  if (from.size() != kernel.n_in()) throw DimensionError("reachable_from: distribution length mismatch");
  const std::size_t n = kernel.n_in();
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i)
    if (from[i] > 0.0) {
      seen[i] = true;
      queue.push_back(i);
    }
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v)
      if (!seen[v] && kernel(u, v) > 0.0) {
        seen[v] = true;
        queue.push_back(v);
      }
  }
  return seen;
}

std::size_t state_period(const TransitionKernel& kernel, std::size_t state) {
  require_square(kernel, "state_period");
  if (state >= kernel.n_in()) throw DimensionError("state_period: state index out of range");
  const auto cls = classify_states(kernel);
  const std::size_t p = component_period(kernel, cls.classes[cls.class_of[state]], cls.class_of);
  if (p == 0) throw DomainError("state " + std::to_string(state) + " never returns to itself");
  return p;
}

AsymptoticProfile asymptotic_profile(const TransitionKernel& kernel, double tol, std::size_t max_iter) {
  require_square(kernel, "asymptotic_profile");
  const std::size_t n = kernel.n_in();
  AsymptoticProfile prof;
  const auto cls = classify_states(kernel);
  prof.recurrent = cls.recurrent;
  prof.state_period.assign(n, std::nullopt);

  std::size_t d = 1;
  for (const auto& comp : cls.classes) {
    if (!cls.recurrent[comp.front()]) continue;
    // A closed class always has a cycle, so its period is positive.
    const std::size_t p = component_period(kernel, comp, cls.class_of);
    for (std::size_t s : comp) prof.state_period[s] = p;
    d = std::lcm(d, p);
  }
  prof.period_lcm = d;

  const Matrix& k = kernel.matrix();
  Matrix limit = matrix_power(k, d);
  double residual = 0.0;
  std::size_t iter = 0;
  for (;;) {
    Matrix next = limit * limit;
    residual = max_abs_diff(next, limit);
    limit = std::move(next);
    ++iter;
    if (residual < tol) break;
    if (iter >= max_iter)
      throw ConvergenceError("asymptotic_profile: K^d iterates did not converge", residual);
  }
  prof.residual = residual;
  prof.iterations = iter;

  prof.subsequence_limits.reserve(d);
  Matrix power = k;  // K^r
  prof.cesaro = Matrix(n, n);
  for (std::size_t r = 1; r <= d; ++r) {
    Matrix lim = power * limit;
    prof.cesaro = prof.cesaro + lim;
    prof.subsequence_limits.push_back(std::move(lim));
    if (r < d) power = power * k;
  }
  prof.cesaro = (1.0 / static_cast<double>(d)) * prof.cesaro;
  return prof;
}

FirstPassageStats first_passage(const TransitionKernel& kernel, std::size_t horizon) {
  require_square(kernel, "first_passage");
  if (horizon == 0) throw ArgumentError("first_passage: horizon must be at least 1");
  const std::size_t n = kernel.n_in();
  const auto cls = classify_states(kernel);

  // can_reach[k][j]: j reachable from k in one or more steps.
  std::vector<std::vector<bool>> can_reach(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> delta(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) delta[j] = kernel(k, j);
    can_reach[k] = reachable_from(kernel, delta);
  }

  FirstPassageStats st;
  st.horizon = horizon;
  st.hit_prob = Matrix(n, n);
  st.residual = Matrix(n, n);
  st.mean_return.assign(n, FirstPassageStats::kInfinite);

  std::vector<double> g(n), next(n), rem(n), rem_next(n);
  for (std::size_t j = 0; j < n; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = kernel(i, j);
      st.hit_prob(i, j) = g[i];
      rem[i] = (i != j && can_reach[i][j]) ? 1.0 : 0.0;
    }
    mean += g[j];
    for (std::size_t step = 2; step <= horizon; ++step) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          if (k != j) acc += kernel(i, k) * g[k];
        next[i] = acc;
      }
      g.swap(next);
      for (std::size_t i = 0; i < n; ++i) st.hit_prob(i, j) += g[i];
      mean += static_cast<double>(step) * g[j];
    }
    // rem_N(i) = P(avoid j for N steps and sit in a state that can still reach j)
    for (std::size_t step = 1; step <= horizon; ++step) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          if (k != j) acc += kernel(i, k) * rem[k];
        rem_next[i] = acc;
      }
      rem.swap(rem_next);
    }
    for (std::size_t i = 0; i < n; ++i) {
      st.residual(i, j) = rem[i];
      st.max_residual = std::max(st.max_residual, rem[i]);
    }
    if (cls.recurrent[j]) st.mean_return[j] = mean;
  }
  return st;
}

Matrix cesaro_from_first_passage(const FirstPassageStats& stats) {
  const std::size_t n = stats.hit_prob.rows();
  Matrix pi(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(stats.mean_return[j])) continue;
    for (std::size_t i = 0; i < n; ++i) pi(i, j) = stats.hit_prob(i, j) / stats.mean_return[j];
  }
  return pi;
}

}  // namespace workcap

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

#include "workcap/capacity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "workcap/agents.hpp"
#include "workcap/errors.hpp"

namespace workcap {

const char* method_name(CapacityMethod m) noexcept {
  switch (m) {
    case CapacityMethod::closed_form_noiseless:
      return "closed_form_noiseless";
    case CapacityMethod::closed_form_memoryless:
      return "closed_form_memoryless";
    case CapacityMethod::closed_form_unifilar_product:
      return "closed_form_unifilar_product";
    case CapacityMethod::numeric_lower_bound:
      return "numeric_lower_bound";
  }
  return "unknown";
}

CapacityResult capacity_noiseless(const EnvironmentModel& env) {
  if (!is_noiseless(env)) throw ClassError("environment is not noiseless");
  CapacityResult r;
  r.value = 0.0;
  r.method = CapacityMethod::closed_form_noiseless;
  r.witness = build_identity(env.alphabet);
  return r;
}

// ---------------------------------------------------------------------------
// Memoryless channels

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct MemorylessObjective {
  const TransitionKernel& phi;

  std::vector<double> output(const std::vector<double>& p) const { return propagate(p, phi.matrix()); }

  double value(const std::vector<double>& p) const { return shannon_entropy(p) - shannon_entropy(output(p)); }

  // Gradient on the simplex up to an additive constant.
  std::vector<double> gradient(const std::vector<double>& p) const {
    const auto q = output(p);
    const std::size_t A = p.size();
    std::vector<double> g(A, 0.0);
    for (std::size_t i = 0; i < A; ++i) {
      double acc = -std::log(p[i]);
      for (std::size_t s = 0; s < q.size(); ++s)
        if (phi(i, s) > 0.0) acc += phi(i, s) * std::log(q[s]);
      g[i] = acc;
    }
    return g;
  }
};

void renormalize(std::vector<double>& p) {
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= sum;
}

// Multiplicative-weights ascent: p_i <- p_i exp(eta g_i) / Z with step
// halving on failure. Stays in the open simplex.
std::pair<std::vector<double>, bool> exponentiated_gradient(const MemorylessObjective& obj, std::vector<double> p) {
  double fp = obj.value(p);
  double eta = 1.0;
  std::size_t quiet = 0;
  for (std::size_t it = 0; it < 20000; ++it) {
    const auto g = obj.gradient(p);
    const double gmax = *std::max_element(g.begin(), g.end());
    std::vector<double> cand(p.size());
    for (;;) {
      for (std::size_t i = 0; i < p.size(); ++i) cand[i] = p[i] * std::exp(eta * (g[i] - gmax));
      renormalize(cand);
      bool interior = std::all_of(cand.begin(), cand.end(), [](double x) { return x > 0.0; });
      const double fc = interior ? obj.value(cand) : kNegInf;
      if (fc > fp) {
        quiet = fc - fp < 1e-16 ? quiet + 1 : 0;
        p = cand;
        fp = fc;
        eta = std::min(eta * 1.5, 50.0);
        break;
      }
      eta *= 0.5;
      if (eta < 1e-14) return {p, false};
    }
    if (quiet >= 10) return {p, false};
  }
  return {p, true};
}

// Pairwise mass transfers with a shrinking step; reaches boundary optima.
std::vector<double> pattern_search(const MemorylessObjective& obj, std::vector<double> p, double tol) {
  double fp = obj.value(p);
  const std::size_t A = p.size();
  for (double delta = 0.05; delta > std::max(tol, 1e-15);) {
    bool improved = false;
    for (std::size_t i = 0; i < A; ++i)
      for (std::size_t j = 0; j < A; ++j) {
        if (i == j || p[i] == 0.0) continue;
        auto cand = p;
        const double move = std::min(delta, p[i]);
        cand[i] -= move;
        cand[j] += move;
        const double fc = obj.value(cand);
        if (fc > fp) {
          p = std::move(cand);
          fp = fc;
          improved = true;
        }
      }
    if (!improved) delta *= 0.5;
  }
  return p;
}

// Two-symbol channels: roots of d/dp f(p, 1 - p) by bracketing and bisection.
std::vector<double> two_symbol_optimum(const MemorylessObjective& obj) {
  auto deriv = [&](double x) {
    const std::vector<double> p{x, 1.0 - x};
    const auto g = obj.gradient(p);
    return g[0] - g[1];
  };
  auto f = [&](double x) { return obj.value({x, 1.0 - x}); };
  double best_x = 0.0, best_f = f(0.0);
  if (f(1.0) > best_f) best_x = 1.0, best_f = f(1.0);
  constexpr int kGrid = 4096;
  double prev_x = 1e-12, prev_d = deriv(prev_x);
  for (int k = 1; k <= kGrid; ++k) {
    const double x = k == kGrid ? 1.0 - 1e-12 : static_cast<double>(k) / kGrid;
    const double d = deriv(x);
    if (prev_d > 0.0 && d <= 0.0) {
      double lo = prev_x, hi = x;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (deriv(mid) > 0.0 ? lo : hi) = mid;
      }
      const double root = 0.5 * (lo + hi);
      if (f(root) > best_f) best_x = root, best_f = f(root);
    }
    prev_x = x;
    prev_d = d;
  }
  return {best_x, 1.0 - best_x};
}

}  // namespace

CapacityResult capacity_memoryless(const TransitionKernel& reduced, const std::vector<std::string>& alphabet,
                                   double tol) {
  const std::size_t A = reduced.n_in();
  if (A == 0 || reduced.n_out() != A || alphabet.size() != A)
    throw DimensionError("capacity_memoryless: reduced kernel must be square over the alphabet");
  const MemorylessObjective obj{reduced};
  CapacityResult r;
  r.method = CapacityMethod::closed_form_memoryless;

  std::vector<std::vector<double>> starts;
  starts.emplace_back(A, 1.0 / static_cast<double>(A));
  for (std::size_t i = 0; i < A && A > 1; ++i) {
    std::vector<double> p(A, 0.1 / static_cast<double>(A - 1));
    p[i] = 0.9;
    starts.push_back(p);
  }
  std::mt19937_64 rng(0x5eed);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  for (int k = 0; k < 8; ++k) {
    std::vector<double> p(A);
    for (double& x : p) x = gamma(rng) + 1e-6;
    renormalize(p);
    starts.push_back(p);
  }

  std::vector<double> best;
  double best_f = kNegInf;
  for (const auto& s : starts) {
    auto [p, stalled] = exponentiated_gradient(obj, s);
    r.stalled = r.stalled || stalled;
    const double fp = obj.value(p);
    r.trace.push_back({p, fp, 0, stalled});
    if (fp > best_f) best = p, best_f = fp;
  }
  // Vertices are never reached by the multiplicative updates.
  for (std::size_t i = 0; i < A; ++i) {
    std::vector<double> v(A, 0.0);
    v[i] = 1.0;
    if (obj.value(v) > best_f) best = v, best_f = obj.value(v);
  }
  best = pattern_search(obj, best, tol);
  best_f = obj.value(best);

  if (A == 2) {
    const auto p2 = two_symbol_optimum(obj);
    const double f2 = obj.value(p2);
    r.cross_check_gap = std::abs(f2 - best_f);
    if (f2 > best_f) best = p2, best_f = f2;
  }
  renormalize(best);
  r.value = best_f;
  r.action_distribution = best;
  r.witness = build_memoryless(alphabet, best);
  return r;
}

CapacityResult capacity_memoryless(const EnvironmentModel& env, double tol) {
  const auto reduced = is_memoryless_invariant(env);
  if (!reduced) throw ClassError("environment is not memoryless invariant");
  return capacity_memoryless(*reduced, env.alphabet, tol);
}

CapacityResult capacity_unifilar_product(const EnvironmentModel& env, const EntropyRateOptions& opts) {
  if (!is_unifilar(env)) throw ClassError("environment is not unifilar");
  if (!is_product(env)) throw ClassError("environment is not a product channel");
  CapacityResult r;
  r.method = CapacityMethod::closed_form_unifilar_product;
  r.value = std::log(static_cast<double>(env.n_symbols())) - entropy_rate(env, opts);
  r.witness = build_predictive(build_uniform(env.alphabet), env);
  r.memory_size = r.witness->n_memory();
  return r;
}

// ---------------------------------------------------------------------------
// Numerical lower bound

std::size_t agent_coordinate_count(std::size_t n_symbols, std::size_t n_memory) {
  const std::size_t block = n_symbols * n_memory;
  return block * block + block;
}

namespace {

void softmax_into(const double* x, std::size_t n, std::span<double> out) {
  const double mx = *std::max_element(x, x + n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += out[i] = std::exp(x[i] - mx);
  for (std::size_t i = 0; i < n; ++i) out[i] /= sum;
}

std::vector<std::string> memory_labels(std::size_t M) {
  std::vector<std::string> out;
  for (std::size_t m = 0; m < M; ++m) out.push_back("m" + std::to_string(m));
  return out;
}

AgentModel unchecked_agent(const std::vector<std::string>& alphabet, std::size_t M, Matrix k, Distribution init) {
  return AgentModel{alphabet, memory_labels(M), TransitionKernel::unchecked(std::move(k)), std::move(init)};
}

double evaluate(const EnvironmentModel& env, const AgentModel& agent) {
  try {
    return work_rate(PerceptActionLoop(agent, env), 0).rate;
  } catch (const ConvergenceError&) {
    return kNegInf;
  }
}

struct NelderMeadResult {
  std::vector<double> x;
  double f = kNegInf;
  std::size_t evaluations = 0;
  bool stalled = false;
};

// Maximizes f from x0 with the standard reflection / expansion /
// contraction / shrink moves.
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, double step, double tol, std::size_t window,
                             std::size_t max_evals) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return f(x);
  };
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) val[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> history;
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] > val[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    history.push_back(val[best]);
    if (history.size() > window && history.back() - history[history.size() - 1 - window] < tol) break;
    if (res.evaluations >= max_evals) {
      res.stalled = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - pts[worst][j]);
    const double fr = eval(xr);
    if (fr > val[best]) {
      for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - pts[worst][j]);
      const double fe = eval(xe);
      if (fe > fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr > val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr > val[worst];
    for (std::size_t j = 0; j < n; ++j)
      xc[j] = outside ? centroid[j] + 0.5 * (xr[j] - centroid[j]) : centroid[j] + 0.5 * (pts[worst][j] - centroid[j]);
    const double fc = eval(xc);
    if (fc > (outside ? fr : val[worst])) {
      pts[worst] = xc;
      val[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
      val[i] = eval(pts[i]);
    }
  }
  const std::size_t best =
      static_cast<std::size_t>(std::max_element(val.begin(), val.end()) - val.begin());
  res.x = pts[best];
  res.f = val[best];
  return res;
}

// Pads a witness with one unused memory state whose rows copy memory 0.
AgentModel lift_agent(const AgentModel& agent) {
  const std::size_t A = agent.n_symbols(), M = agent.n_memory(), Mn = M + 1;
  Matrix k(A * Mn, A * Mn);
  for (std::size_t s = 0; s < A; ++s)
    for (std::size_t m = 0; m < Mn; ++m) {
      const std::size_t src = m < M ? m : 0;
      for (std::size_t a = 0; a < A; ++a)
        for (std::size_t mn = 0; mn < M; ++mn) k(s * Mn + m, a * Mn + mn) = agent.theta(a, mn, s, src);
    }
  Distribution init(A * Mn, 0.0);
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t m = 0; m < M; ++m) init[a * Mn + m] = agent.initial[a * M + m];
  return unchecked_agent(agent.alphabet, Mn, std::move(k), std::move(init));
}

std::vector<double> coordinates_of(const AgentModel& agent) {
  std::vector<double> x;
  auto logit = [](double p) { return std::log(std::max(p, 1e-8)); };
  for (std::size_t r = 0; r < agent.kernel.n_in(); ++r)
    for (double p : agent.kernel.row(r)) x.push_back(logit(p));
  for (double p : agent.initial) x.push_back(logit(p));
  return x;
}

AgentModel snap(const AgentModel& agent, double threshold) {
  Matrix k = agent.kernel.matrix();
  Distribution init = agent.initial;
  auto fix = [&](std::span<double> row) {
    for (double& x : row)
      if (x < threshold) x = 0.0;
    double sum = 0.0;
    for (double x : row) sum += x;
    for (double& x : row) x /= sum;
  };
  for (std::size_t r = 0; r < k.rows(); ++r) fix(k.row(r));
  fix(init);
  return unchecked_agent(agent.alphabet, agent.n_memory(), std::move(k), std::move(init));
}

}  // namespace

AgentModel agent_from_coordinates(const std::vector<std::string>& alphabet, std::size_t n_memory,
                                  const std::vector<double>& x) {
  const std::size_t A = alphabet.size(), M = n_memory, block = A * M;
  if (A == 0 || M == 0) throw DimensionError("agent_from_coordinates: empty alphabet or memory");
  if (x.size() != agent_coordinate_count(A, M)) throw DimensionError("agent_from_coordinates: wrong coordinate count");
  Matrix k(block, block);
  for (std::size_t r = 0; r < block; ++r) softmax_into(x.data() + r * block, block, k.row(r));
  Distribution init(block);
  softmax_into(x.data() + block * block, block, init);
  return unchecked_agent(alphabet, M, std::move(k), std::move(init));
}

CapacityResult capacity_lower_bound(const EnvironmentModel& env, const LowerBoundOptions& opts) {
  if (opts.memory_size == 0) throw ArgumentError("capacity_lower_bound: memory size must be at least 1");
  const std::size_t A = env.n_symbols(), M = opts.memory_size;
  const std::size_t dim = agent_coordinate_count(A, M);

  std::optional<AgentModel> lifted;
  double lifted_f = kNegInf;
  if (M > 1) {
    LowerBoundOptions smaller = opts;
    smaller.memory_size = M - 1;
    auto prev = capacity_lower_bound(env, smaller);
    lifted = lift_agent(*prev.witness);
    lifted_f = evaluate(env, *lifted);
  }

  auto objective = [&](const std::vector<double>& x) { return evaluate(env, agent_from_coordinates(env.alphabet, M, x)); };

  const std::size_t restarts = std::max<std::size_t>(opts.restarts, 1);
  std::vector<NelderMeadResult> results(restarts);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < restarts; r = next++) {
      std::vector<double> x0(dim, 0.0);
      if (r == 0) {
        if (lifted) x0 = coordinates_of(*lifted);
      } else {
        std::mt19937_64 rng(opts.seed * 0x9E3779B97F4A7C15ULL + r);
        std::normal_distribution<double> normal(0.0, 1.5);
        for (double& v : x0) v = normal(rng);
      }
      results[r] = nelder_mead(objective, x0, 1.0, opts.tol, opts.window, opts.max_evaluations);
    }
  };
  std::size_t threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, restarts);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  CapacityResult r;
  r.method = CapacityMethod::numeric_lower_bound;
  r.memory_size = M;
  std::size_t best = 0;
  for (std::size_t i = 0; i < restarts; ++i) {
    r.trace.push_back({results[i].x, results[i].f, results[i].evaluations, results[i].stalled});
    r.stalled = r.stalled || results[i].stalled;
    if (results[i].f > results[best].f) best = i;
  }
  AgentModel witness = agent_from_coordinates(env.alphabet, M, results[best].x);
  double value = results[best].f;
  const AgentModel snapped = snap(witness, opts.snap_threshold);
  if (const double fs = evaluate(env, snapped); fs > value) {
    witness = snapped;
    value = fs;
  }
  if (lifted && lifted_f >= value) {
    witness = *lifted;
    value = lifted_f;
  }
  r.value = value;
  r.witness = std::move(witness);
  return r;
}

CapacityResult capacity(const EnvironmentModel& env, const LowerBoundOptions& opts) {
  if (is_noiseless(env)) return capacity_noiseless(env);
  if (is_memoryless_invariant(env)) return capacity_memoryless(env);
  if (is_unifilar(env) && is_product(env)) return capacity_unifilar_product(env);
  return capacity_lower_bound(env, opts);
}

bool check_capacity_bounds(const CapacityResult& result, const EnvironmentModel& env, double tol) {
  return result.value >= -tol && result.value <= std::log(static_cast<double>(env.n_symbols())) + tol;
}

SubadditivityReport check_subadditivity(const EnvironmentModel& env1, const EnvironmentModel& env2, double slack) {
  SubadditivityReport rep;
  rep.slack = slack;
  rep.first = capacity_memoryless(env1).value;
  rep.second = capacity_memoryless(env2).value;
  rep.cascaded = capacity_memoryless(cascade(env1, env2)).value;
  rep.holds = rep.cascaded <= rep.first + rep.second + slack;
  return rep;
}

AgentClassification classify_agent_sets(const EnvironmentModel& env, const AgentModel& agent, std::size_t horizon,
                                        double tol, std::optional<double> reference_capacity) {
  const PerceptActionLoop loop(agent, env);
  AgentClassification c;
  const auto mea = has_max_entropy_actions(loop, tol);
  c.in_mea = mea.holds;
  c.mea_estimate = mea.estimate;
  c.predictiveness = am_predictiveness(loop, horizon);
  c.in_pred_estimate = c.predictiveness.mean <= tol;
  c.work = work_rate(loop, horizon);
  if (reference_capacity) c.efficient = std::abs(c.work.rate - *reference_capacity) <= tol;
  return c;
}

}  // namespace workcap

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

#include "workcap/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <limits>
#include <numeric>

#include "workcap/agents.hpp"
#include "workcap/bayesnet.hpp"
#include "workcap/capacity.hpp"
#include "workcap/loop.hpp"
#include "workcap/markov.hpp"
#include "workcap/model_io.hpp"

namespace workcap {

// ---------------------------------------------------------------------------
// Random models

Distribution random_distribution(Rng& rng, std::size_t n) {
  std::exponential_distribution<double> expo(1.0);
  Distribution p(n);
  for (double& x : p) x = expo(rng) + 1e-12;
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= sum;
  return p;
}

Matrix random_stochastic(Rng& rng, std::size_t rows, std::size_t cols, double sparsity) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    auto row = m.row(i);
    double sum = 0.0;
    for (double& x : row) {
      x = unit(rng) < sparsity ? 0.0 : expo(rng) + 1e-12;
      sum += x;
    }
    if (sum == 0.0) {
      row[rng() % cols] = 1.0;
      sum = 1.0;
    }
    for (double& x : row) x /= sum;
  }
  return m;
}

std::vector<std::string> symbols(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

namespace {

std::vector<std::string> labels(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

EnvironmentModel random_environment(Rng& rng, std::size_t n_symbols, std::size_t n_hidden, RandomEnvKind kind) {
  const std::size_t A = n_symbols;
  const std::size_t Z = kind == RandomEnvKind::memoryless ? 1 : n_hidden;
  Matrix phi = random_stochastic(rng, A * Z, A * Z);
  if (kind == RandomEnvKind::product)
    for (std::size_t a = 1; a < A; ++a)
      for (std::size_t z = 0; z < Z; ++z)
        for (std::size_t c = 0; c < A * Z; ++c) phi(a * Z + z, c) = phi(z, c);
  return make_environment(symbols(A), labels("z", Z), std::move(phi), random_distribution(rng, Z));
}

AgentModel random_agent(Rng& rng, std::size_t n_symbols, std::size_t n_memory) {
  const std::size_t n = n_symbols * n_memory;
  return make_agent(symbols(n_symbols), labels("m", n_memory), random_stochastic(rng, n, n),
                    random_distribution(rng, n));
}

TransitionKernel random_chain(Rng& rng, std::size_t n) {
  if (n >= 2 && rng() % 4 == 0) {
    // Cyclic classes 0 -> 1 -> ... -> k-1 -> 0 over a random state labeling.
    const std::size_t k = 2 + rng() % std::min<std::size_t>(2, n - 1);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::size_t> cls(n);
    for (std::size_t i = 0; i < n; ++i) cls[perm[i]] = i % k;
    Matrix m(n, n);
    std::exponential_distribution<double> expo(1.0);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (cls[j] == (cls[i] + 1) % k) sum += m(i, j) = expo(rng) + 1e-3;
      for (double& x : m.row(i)) x /= sum;
    }
    return TransitionKernel::unchecked(std::move(m));
  }
  return TransitionKernel::unchecked(random_stochastic(rng, n, n, 0.4));
}

// ---------------------------------------------------------------------------
// Criteria

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::filesystem::path model(const VerifyConfig& cfg, const char* name) { return cfg.models_dir / name; }

const double kFig5Capacity = 0.5 * std::log(0.75 + 1.0 / std::sqrt(2.0));

}  // namespace

CriterionResult criterion_fig5_capacity(const VerifyConfig& cfg) {
  CriterionResult r{1, "fig5 capacity", false, "", 0.0};
  const auto env = load_environment(model(cfg, "fig5.json"));
  const auto t0 = Clock::now();
  const auto res = capacity(env);
  r.seconds = seconds_since(t0);
  const double p0 = res.action_distribution ? (*res.action_distribution)[0] : -1.0;
  const double err_value = std::abs(res.value - kFig5Capacity);
  const double err_p = std::abs(p0 - 1.0 / std::sqrt(2.0));
  r.passed = res.method == CapacityMethod::closed_form_memoryless && err_value <= 1e-6 && err_p <= 1e-4 &&
             r.seconds < 1.0;
  r.detail = fmt("%.9f %s (%s), witness p(0)=%.9f; |dC|=%.2e nats (<=1e-6), |dp|=%.2e (<=1e-4)",
                 res.value_in(cfg.units), unit_name(cfg.units), method_name(res.method), p0, err_value, err_p);
  return r;
}

CriterionResult criterion_fig5_uniform_rate(const VerifyConfig& cfg) {
  CriterionResult r{2, "fig5 uniform-agent work rate", false, "", 0.0};
  const auto env = load_environment(model(cfg, "fig5.json"));
  const auto t0 = Clock::now();
  const auto rep = work_rate(PerceptActionLoop(build_uniform(env.alphabet), env));
  r.seconds = seconds_since(t0);
  const double expected_bits = 1.0 - std::log(256.0 / 27.0) / std::log(16.0);
  const double err = std::abs(from_nats(rep.rate, LogBase::bits) - expected_bits);
  r.passed = err <= 1e-9 && r.seconds < 1.0;
  r.detail = fmt("rate %.12f %s, |d|=%.2e bits (<=1e-9)", from_nats(rep.rate, cfg.units), unit_name(cfg.units), err);
  return r;
}

CriterionResult criterion_identity_noiseless(const VerifyConfig& cfg) {
  CriterionResult r{3, "identity agent and noiseless capacity", false, "", 0.0};
  const auto t0 = Clock::now();
  Rng rng(cfg.seed * 7919 + 3);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t A = 2 + rng() % 2, Z = 1 + rng() % 3;
    const auto env = random_environment(rng, A, Z);
    const auto rep = work_rate(PerceptActionLoop(build_identity(env.alphabet), env));
    worst = std::max(worst, std::abs(rep.rate));
  }
  const auto id = load_environment(model(cfg, "identity.json"));
  const auto cap = capacity(id);
  r.seconds = seconds_since(t0);
  r.passed = worst <= 1e-10 && cap.method == CapacityMethod::closed_form_noiseless && cap.value == 0.0;
  r.detail = fmt("max |rate| over 20 environments %.2e nats (<=1e-10); noiseless capacity %.17g (%s)", worst,
                 cap.value, method_name(cap.method));
  return r;
}

CriterionResult criterion_golden_mean(const VerifyConfig& cfg) {
  CriterionResult r{4, "golden-mean capacity and predictive witness", false, "", 0.0};
  const auto env = load_environment(model(cfg, "golden_mean.json"));
  const auto t0 = Clock::now();
  const auto res = capacity(env);
  const double cap_bits = res.value_in(LogBase::bits);
  const double witness_bits = from_nats(work_rate(PerceptActionLoop(*res.witness, env)).rate, LogBase::bits);
  EntropyRateOptions opts;
  opts.tol = cfg.tol;
  const double closed = entropy_rate(env, {}, LogBase::bits);
  std::string block_note;
  bool block_ok = false;
  try {
    const double blocks = block_entropy_rate(env, opts, LogBase::bits);
    block_ok = std::abs(blocks - closed) <= 1e-5;
    block_note = fmt("block-entropy rate %.9f bits", blocks);
  } catch (const std::exception& e) {
    block_note = std::string("block-entropy route failed: ") + e.what();
  }
  r.seconds = seconds_since(t0);
  const double err_cap = std::abs(cap_bits - 1.0 / 3.0), err_w = std::abs(witness_bits - 1.0 / 3.0);
  r.passed = res.method == CapacityMethod::closed_form_unifilar_product && err_cap <= 1e-5 && err_w <= 1e-5 &&
             block_ok && r.seconds < 5.0;
  r.detail = fmt("capacity %.9f %s (%s), witness |M|=%zu rate %.9f %s; ", res.value_in(cfg.units),
                 unit_name(cfg.units), method_name(res.method), res.witness->n_memory(),
                 from_nats(to_nats(witness_bits, LogBase::bits), cfg.units), unit_name(cfg.units)) +
             block_note;
  return r;
}

CriterionResult criterion_mutual_exclusivity(const VerifyConfig& cfg) {
  CriterionResult r{5, "fig5 agent-set classification", false, "", 0.0};
  const auto env = load_environment(model(cfg, "fig5.json"));
  const auto t0 = Clock::now();
  const double cap = capacity_memoryless(env).value;
  const double tol = 1e-9;
  const double q = 1.0 / std::sqrt(2.0);

  const auto uni = classify_agent_sets(env, build_uniform(env.alphabet), 4, tol, cap);
  const auto last = classify_agent_sets(env, build_last_action(env.alphabet, {0.5, 0.5}), 4, tol, cap);
  const auto opt = classify_agent_sets(env, build_memoryless(env.alphabet, {q, 1.0 - q}), 4, tol, cap);
  r.seconds = seconds_since(t0);

  double last_max_score = 0.0;
  for (double s : last.predictiveness.scores) last_max_score = std::max(last_max_score, s);
  const bool uni_ok = uni.in_mea && !uni.in_pred_estimate && !*uni.efficient && uni.work.rate < cap;
  const bool last_ok = last_max_score <= 1e-10 && !last.in_mea && !*last.efficient && last.work.rate <= 0.0;
  const bool opt_ok = *opt.efficient && !opt.in_mea && opt.mea_estimate < std::log(2.0) &&
                      opt.predictiveness.scores.front() > 1e-3 && !opt.in_pred_estimate;
  r.passed = uni_ok && last_ok && opt_ok && r.seconds < 5.0;
  const auto u = cfg.units;
  r.detail = fmt("uniform: mea=%d pred=%.6f eff=%d rate=%.6f; last-action: mea=%d max score=%.1e eff=%d rate=%.6f; "
                 "optimal: mea=%d <H(A|M)>=%.6f pred=%.6f eff=%d rate=%.6f (%s)",
                 uni.in_mea, from_nats(uni.predictiveness.mean, u), *uni.efficient, from_nats(uni.work.rate, u),
                 last.in_mea, from_nats(last_max_score, u), *last.efficient, from_nats(last.work.rate, u), opt.in_mea,
                 from_nats(opt.mea_estimate, u), from_nats(opt.predictiveness.mean, u), *opt.efficient,
                 from_nats(opt.work.rate, u), unit_name(u));
  return r;
}

namespace {

// Largest deviations of the one-step Markov and homogeneity conditions in an
// exact trajectory table, plus the deviation from the global kernel.
struct MarkovCheck {
  double markov = 0.0;
  double homogeneity = 0.0;
  double kernel = 0.0;
};

MarkovCheck check_markov(const PerceptActionLoop& loop, std::size_t T) {
  const auto traj = trajectory_distribution(loop, T);
  const auto chain = build_global_chain(loop);
  const std::size_t N = chain.size();
  const auto& full = traj.joint.probs();
  // prefix[t]: law of U_{0:t+1}, obtained by summing out trailing rounds.
  std::vector<std::vector<double>> prefix(T);
  prefix[T - 1] = full;
  for (std::size_t t = T - 1; t-- > 0;) {
    prefix[t].assign(prefix[t + 1].size() / N, 0.0);
    for (std::size_t i = 0; i < prefix[t + 1].size(); ++i) prefix[t][i / N] += prefix[t + 1][i];
  }
  // pair[t](u, v) = p(U_t = u, U_{t+1} = v)
  std::vector<Matrix> pair(T - 1, Matrix(N, N));
  for (std::size_t t = 0; t + 1 < T; ++t) {
    const auto& p = prefix[t + 1];
    for (std::size_t i = 0; i < p.size(); ++i) pair[t](i / N % N, i % N) += p[i];
  }
  MarkovCheck out;
  std::vector<std::vector<double>> cond(T - 1, std::vector<double>(N * N, -1.0));
  for (std::size_t t = 0; t + 1 < T; ++t)
    for (std::size_t u = 0; u < N; ++u) {
      double pu = 0.0;
      for (std::size_t v = 0; v < N; ++v) pu += pair[t](u, v);
      if (pu <= 0.0) continue;
      for (std::size_t v = 0; v < N; ++v) {
        const double c = pair[t](u, v) / pu;
        cond[t][u * N + v] = c;
        out.kernel = std::max(out.kernel, std::abs(c - chain.kernel(u, v)));
      }
    }
  for (std::size_t t = 1; t + 1 < T; ++t)
    for (std::size_t k = 0; k < N * N; ++k)
      if (cond[t][k] >= 0.0 && cond[0][k] >= 0.0)
        out.homogeneity = std::max(out.homogeneity, std::abs(cond[t][k] - cond[0][k]));
  // p(u_{t+1} | u_{0:t+1}) against p(u_{t+1} | u_t)
  for (std::size_t t = 0; t + 1 < T; ++t) {
    const auto& hist = prefix[t];
    const auto& ext = prefix[t + 1];
    for (std::size_t h = 0; h < hist.size(); ++h) {
      if (hist[h] <= 0.0) continue;
      const std::size_t last = h % N;
      for (std::size_t v = 0; v < N; ++v)
        out.markov = std::max(out.markov, std::abs(ext[h * N + v] / hist[h] - cond[t][last * N + v]));
    }
  }
  return out;
}

}  // namespace

CriterionResult criterion_global_markov(const VerifyConfig& cfg) {
  CriterionResult r{6, "global Markov chain property", false, "", 0.0};
  const auto t0 = Clock::now();
  Rng rng(cfg.seed * 7919 + 6);
  MarkovCheck worst;
  for (int i = 0; i < 10; ++i) {
    const std::size_t M = 1 + rng() % 3, Z = 1 + rng() % 3;
    auto env = random_environment(rng, 2, Z);
    auto agent = random_agent(rng, 2, M);
    const auto c = check_markov(PerceptActionLoop(std::move(agent), std::move(env)), 4);
    worst.markov = std::max(worst.markov, c.markov);
    worst.homogeneity = std::max(worst.homogeneity, c.homogeneity);
    worst.kernel = std::max(worst.kernel, c.kernel);
  }
  r.seconds = seconds_since(t0);
  r.passed = worst.markov <= 1e-12 && worst.homogeneity <= 1e-12 && worst.kernel <= 1e-12 && r.seconds < 30.0;
  r.detail = fmt("max deviation: Markov %.2e, homogeneity %.2e, vs kernel %.2e (all <=1e-12)", worst.markov,
                 worst.homogeneity, worst.kernel);
  return r;
}

CriterionResult criterion_cesaro(const VerifyConfig& cfg) {
  CriterionResult r{7, "Cesaro limits and first passage", false, "", 0.0};
  const auto t0 = Clock::now();
  Rng rng(cfg.seed * 7919 + 7);
  double worst_avg = 0.0, worst_fp = 0.0;
  std::size_t compared = 0, periodic = 0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 2 + rng() % 5;
    const auto k = random_chain(rng, n);
    const auto prof = asymptotic_profile(k);
    if (prof.period_lcm > 1) ++periodic;
    // Brute-force time average of K^t, t < N; its bias decays like 1/N.
    const std::size_t N = 200000 * prof.period_lcm;
    const auto& K = k.matrix();
    Matrix sum(n, n), power = Matrix::identity(n), next(n, n);
    for (std::size_t t = 0; t < N; ++t) {
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          sum(a, b) += power(a, b);
          double acc = 0.0;
          for (std::size_t c = 0; c < n; ++c) acc += power(a, c) * K(c, b);
          next(a, b) = acc;
        }
      std::swap(power, next);
    }
    worst_avg = std::max(worst_avg, max_abs_diff((1.0 / static_cast<double>(N)) * sum, prof.cesaro));
    const auto fp = first_passage(k, 5000);
    const auto pi = cesaro_from_first_passage(fp);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (fp.residual(a, b) >= 1e-8 || fp.residual(b, b) >= 1e-8) continue;
        ++compared;
        worst_fp = std::max(worst_fp, std::abs(pi(a, b) - prof.cesaro(a, b)));
      }
  }
  r.seconds = seconds_since(t0);
  r.passed = worst_avg <= 1e-3 && worst_fp <= 1e-6 && compared > 0;
  r.detail = fmt("20 chains (%zu periodic): time average vs limit %.2e (<=1e-3); f/m vs limit %.2e (<=1e-6) over "
                 "%zu entries",
                 periodic, worst_avg, worst_fp, compared);
  return r;
}

CriterionResult criterion_subadditivity(const VerifyConfig& cfg) {
  CriterionResult r{8, "capacity subadditivity under cascade", false, "", 0.0};
  const auto t0 = Clock::now();
  Rng rng(cfg.seed * 7919 + 8);
  std::size_t held = 0;
  double tightest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 50; ++i) {
    const auto e1 = random_environment(rng, 2, 1, RandomEnvKind::memoryless);
    const auto e2 = random_environment(rng, 2, 1, RandomEnvKind::memoryless);
    const auto rep = check_subadditivity(e1, e2, 1e-8);
    if (rep.holds) ++held;
    tightest = std::min(tightest, rep.first + rep.second - rep.cascaded);
  }
  r.seconds = seconds_since(t0);
  r.passed = held == 50;
  r.detail = fmt("%zu/50 pairs hold; smallest margin C1+C2-C12 = %.3e %s", held, from_nats(tightest, cfg.units),
                 unit_name(cfg.units));
  return r;
}

CriterionResult criterion_dseparation(const VerifyConfig& cfg) {
  CriterionResult r{9, "d-separation soundness", false, "", 0.0};
  const auto t0 = Clock::now();
  Rng rng(cfg.seed * 7919 + 9);
  const std::size_t T = 3;
  std::size_t tested = 0, violations = 0;
  double max_cmi = 0.0;
  bool controls_ok = true;
  std::string control_note;
  const std::pair<LoopVariant, RandomEnvKind> templates[] = {
      {LoopVariant::general, RandomEnvKind::general},
      {LoopVariant::memoryless_env, RandomEnvKind::memoryless},
      {LoopVariant::product_env, RandomEnvKind::product},
  };
  for (const auto& [variant, kind] : templates) {
    const Dag dag = build_loop_dag(T, variant);
    double best_control = 0.0;
    for (int i = 0; i < 3; ++i) {
      const std::size_t M = 1 + rng() % 2, Z = 1 + rng() % 2;
      PerceptActionLoop loop(random_agent(rng, 2, M), random_environment(rng, 2, Z, kind));
      const auto rep = validate_compatibility(loop, variant, T, 30, rng());
      tested += rep.tested;
      violations += rep.violations.size();
      max_cmi = std::max(max_cmi, rep.max_cmi);
      const auto traj = trajectory_distribution(loop, T);
      // Dependent pairs that no template separates.
      const std::vector<std::pair<std::string, std::string>> controls = {{"S0", "M1"}, {"S0", "A1"}, {"M0", "A0"}};
      for (const auto& [x, y] : controls) {
        if (d_separated(dag, {x}, {y}, {})) {
          controls_ok = false;
          continue;
        }
        best_control = std::max(best_control, mutual_information(traj.joint, {x}, {y}));
      }
    }
    if (best_control <= 1e-3) controls_ok = false;
    control_note += fmt(" %s control %.3e;", variant_name(variant), best_control);
  }
  r.seconds = seconds_since(t0);
  r.passed = tested >= 200 && violations == 0 && controls_ok;
  r.detail = fmt("%zu separated triples, %zu violations, max CMI %.2e nats (<1e-9);", tested, violations, max_cmi) +
             control_note;
  return r;
}

std::vector<CriterionResult> run_acceptance(const VerifyConfig& cfg) {
  using Fn = CriterionResult (*)(const VerifyConfig&);
  const std::pair<int, Fn> all[] = {
      {1, criterion_fig5_capacity},  {2, criterion_fig5_uniform_rate}, {3, criterion_identity_noiseless},
      {4, criterion_golden_mean},    {5, criterion_mutual_exclusivity}, {6, criterion_global_markov},
      {7, criterion_cesaro},         {8, criterion_subadditivity},     {9, criterion_dseparation},
  };
  std::vector<CriterionResult> out;
  for (const auto& [id, fn] : all) {
    try {
      out.push_back(fn(cfg));
    } catch (const std::exception& e) {
      out.push_back({id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what(), 0.0});
    }
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt("%s  %d  %-44s (%.3f s)  ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds) + r.detail;
}

}  // namespace workcap

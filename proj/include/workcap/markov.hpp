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

// Finite homogeneous Markov chains: communication classes, periods,
// first-passage statistics and the periodic / Cesaro limits of the
// powers of a transition kernel.
//
// Convention: kernels are right stochastic, entry (i, j) holds the
// probability of moving from i to j, so distributions are row vectors and
// propagate as p <- p * K.

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace workcap {

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

/// Largest absolute entrywise difference; shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Row vector times matrix.
std::vector<double> propagate(std::span<const double> p, const Matrix& m);

/// Conditional probability table phi(j | i): row i is the law of the output
/// given input i. Rows sum to one within 1e-12 and all entries lie in [0, 1].
class TransitionKernel {
 public:
  static constexpr double kRowTolerance = 1e-12;

  TransitionKernel() = default;
  /// Validates stochasticity; throws DimensionError on an empty table and
  /// ArgumentError naming the first offending row otherwise.
  explicit TransitionKernel(Matrix probs);

  /// Skips validation. For kernels assembled from already-validated parts.
  static TransitionKernel unchecked(Matrix probs);

  std::size_t n_in() const noexcept { return probs_.rows(); }
  std::size_t n_out() const noexcept { return probs_.cols(); }
  bool square() const noexcept { return n_in() == n_out(); }

  /// phi(out | in)
  double operator()(std::size_t in, std::size_t out) const { return probs_(in, out); }
  std::span<const double> row(std::size_t in) const { return probs_.row(in); }
  const Matrix& matrix() const noexcept { return probs_; }

  friend bool operator==(const TransitionKernel&, const TransitionKernel&) = default;

 private:
  Matrix probs_;
};

/// Probability vector over a finite index set.
using Distribution = std::vector<double>;

/// Throws ArgumentError unless p is nonnegative and sums to one within tol.
void check_distribution(std::span<const double> p, double tol = 1e-12);

/// Kernel power K^n by repeated squaring.
Matrix matrix_power(const Matrix& k, std::size_t n);

struct StateClassification {
  /// Communicating classes (strongly connected components of the
  /// positive-probability digraph), each sorted, ordered by smallest member.
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::size_t> class_of;
  /// A state is recurrent iff its class is closed.
  std::vector<bool> recurrent;
};

StateClassification classify_states(const TransitionKernel& kernel);

/// States reachable from the support of `from` along positive entries.
std::vector<bool> reachable_from(const TransitionKernel& kernel, std::span<const double> from);

/// gcd of all return times to `state`. Throws DomainError when the state can
/// never return to itself.
std::size_t state_period(const TransitionKernel& kernel, std::size_t state);

struct AsymptoticProfile {
  /// d: lcm of the periods of the recurrent states.
  std::size_t period_lcm = 1;
  /// subsequence_limits[r-1] = lim_n K^(n d + r), r = 1..d.
  std::vector<Matrix> subsequence_limits;
  /// Cesaro limit of K^t.
  Matrix cesaro;
  std::vector<bool> recurrent;
  /// Period of each recurrent state, empty for transient ones.
  std::vector<std::optional<std::size_t>> state_period;
  /// Max-norm difference between the last two iterates of K^d.
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Limits of the d periodic subsequences of K^t and their Cesaro mean.
/// lim K^(nd) is approached by repeated squaring of K^d until successive
/// iterates differ by less than tol in max-norm; `max_iter` bounds the number
/// of squarings. Throws ConvergenceError carrying the last residual.
AsymptoticProfile asymptotic_profile(const TransitionKernel& kernel, double tol = 1e-10,
                                     std::size_t max_iter = 1000000);

struct FirstPassageStats {
  static constexpr double kInfinite = std::numeric_limits<double>::infinity();

  std::size_t horizon = 0;
  /// f(i, j): probability of ever visiting j at a time n >= 1 from i,
  /// accumulated up to `horizon`.
  Matrix hit_prob;
  /// m(j, j): mean recurrence time, kInfinite for transient states.
  std::vector<double> mean_return;
  /// Probability mass that has not hit j by `horizon` but can still reach it.
  /// Upper bound on the part of f(i, j) missing from hit_prob.
  Matrix residual;
  double max_residual = 0.0;
};

/// First-passage statistics by the taboo recursion
///   f(1, i, j) = K(i, j),  f(n, i, j) = sum_{k != j} K(i, k) f(n-1, k, j).
FirstPassageStats first_passage(const TransitionKernel& kernel, std::size_t horizon);

/// Cesaro coefficients from first passage data: pi(i, j) = f(i, j) / m(j, j),
/// zero for transient j.
Matrix cesaro_from_first_passage(const FirstPassageStats& stats);

}  // namespace workcap

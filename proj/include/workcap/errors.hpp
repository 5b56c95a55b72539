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
#include <stdexcept>
#include <string>

namespace workcap {

/// Shapes of kernels, distributions or alphabets do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the domain of the operation (e.g. a state that
/// never returns to itself has no period).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Overlapping variable sets or otherwise malformed arguments.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unknown variable or node name.
class KeyError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A model does not belong to the channel class an operation requires.
class ClassError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An exact enumeration would exceed the configured table budget.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t required)
      : std::runtime_error(what), required_(required) {}
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t required_;
};

/// An iterative procedure did not meet its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, double previous = 0.0)
      : std::runtime_error(what), residual_(residual), previous_(previous) {}
  double residual() const noexcept { return residual_; }
  double previous() const noexcept { return previous_; }

 private:
  double residual_;
  double previous_;
};

/// A quantity that must be nonnegative came out clearly negative.
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed model file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace workcap

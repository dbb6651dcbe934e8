/*
 * Copyright 2026 The crisp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <limits>
#include <stdexcept>
#include <string>

namespace crisp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// An evaluator produced NaN or Inf. Carries the label of the offending row
/// (or "objective").
class NonFiniteEvaluation : public std::runtime_error {
 public:
  NonFiniteEvaluation(std::string label, const std::string& where)
      : std::runtime_error("non-finite evaluation in " + label +
                           (where.empty() ? "" : " (" + where + ")")),
        label_(std::move(label)) {}

  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

class DuplicateConstraint : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ProblemTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid problem parameters (non-positive masses, horizon < 2, ...).
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace crisp

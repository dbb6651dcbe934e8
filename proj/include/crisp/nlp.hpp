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

#include <functional>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crisp/types.hpp"

namespace crisp {

/// Selects the serial reference loop or the OpenMP kernel for row
/// evaluation. Both produce bit-identical results.
enum class Exec { Serial, Parallel };

/**
 * A scalar function of the decision vector with a fixed sparsity pattern.
 *
 * `deps` holds the sorted, unique variable indices the function depends on.
 * The evaluator writes one partial derivative per dependency, in `deps`
 * order, into `grad` when `grad` is non-null. Evaluators must be pure.
 */
class ScalarFunction {
 public:
  using Eval = std::function<double(const double* x, double* grad)>;

  /// Upper bound on the number of dependencies of a single row.
  static constexpr int kMaxDeps = 64;

  ScalarFunction() = default;
  /// `deps` may be given in any order; the gradient is still written in the
  /// order `deps` was given to the evaluator and permuted internally.
  ScalarFunction(std::vector<int> deps, Eval eval);

  double operator()(const double* x, double* grad = nullptr) const {
    return eval_(x, grad);
  }
  double value(const Vector& x) const { return eval_(x.data(), nullptr); }

  const std::vector<int>& deps() const { return deps_; }
  int nnz() const { return static_cast<int>(deps_.size()); }
  bool valid() const { return static_cast<bool>(eval_); }

  static ScalarFunction constant(double c);
  static ScalarFunction variable(int index, double scale = 1.0);
  /// sum_k coeff_k * x[index_k] + offset
  static ScalarFunction affine(std::vector<std::pair<int, double>> terms,
                               double offset = 0.0);
  /// scale * a(x) * b(x), gradient a*grad(b) + b*grad(a).
  static ScalarFunction product(const ScalarFunction& a,
                                const ScalarFunction& b, double scale = 1.0);
  /// scale * a(x)^2
  static ScalarFunction square(const ScalarFunction& a, double scale = 1.0);
  static ScalarFunction scaled(const ScalarFunction& a, double scale);

 private:
  std::vector<int> deps_;
  Eval eval_;
};

enum class RowCategory { Dynamics, Complementarity, Bound, InitialCondition, Other };

std::string_view to_string(RowCategory c);

struct RowLabel {
  RowCategory category = RowCategory::Other;
  std::string name;
  int step = -1;

  std::string str() const;
};

enum class VarKind { State, Control, Force, Slack };

/// Per-step naming of the flat decision vector: x[step * per_step() + j]
/// holds variable `names[j]` at time step `step`.
struct VariableLayout {
  int horizon = 1;
  double dt = 1.0;
  std::vector<std::string> names;
  std::vector<VarKind> kinds;

  void add(std::string name, VarKind kind) {
    names.push_back(std::move(name));
    kinds.push_back(kind);
  }
  int per_step() const { return static_cast<int>(names.size()); }
  int n_vars() const { return horizon * per_step(); }
  /// Column of `name` within a step. Throws std::out_of_range if unknown.
  int local(std::string_view name) const;
  int index(int step, std::string_view name) const {
    return step * per_step() + local(name);
  }
  std::vector<std::string> names_of(VarKind kind) const;
};

/// Objective J(x) with gradient and Hessian. Implementations must be pure.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual int n_vars() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual SparseMatrix hessian(const Vector& x) const = 0;
};

/// J(x) = 0.5 x'Hx + g'x + c with constant symmetric H.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(SparseMatrix hessian, Vector linear, double constant = 0.0);

  int n_vars() const override { return static_cast<int>(linear_.size()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  SparseMatrix hessian(const Vector&) const override { return hessian_; }

 private:
  SparseMatrix hessian_;
  Vector linear_;
  double constant_;
};

/// Accumulates 0.5 * w * (x_i - ref)^2 terms into a QuadraticObjective.
class QuadraticCostBuilder {
 public:
  explicit QuadraticCostBuilder(int n_vars) : n_(n_vars), linear_(Vector::Zero(n_vars)) {}
  void add_tracking(int index, double weight, double reference = 0.0);
  std::shared_ptr<const QuadraticObjective> build() const;

 private:
  int n_;
  std::vector<Triplet> entries_;
  Vector linear_;
  double constant_ = 0.0;
};

/// A set of constraint rows with a fixed CSR sparsity pattern.
struct RowSet {
  std::vector<ScalarFunction> functions;
  std::vector<RowLabel> labels;
  std::vector<int> offsets{0};  // CSR row pointers into the Jacobian values

  int size() const { return static_cast<int>(functions.size()); }
  int nnz() const { return offsets.back(); }
  void push_back(ScalarFunction f, RowLabel label);
};

/// Row values only. Serial and parallel variants are bit-identical.
void evaluate_rows(const RowSet& rows, const Vector& x, Vector& values, Exec exec);
/// Row values plus Jacobian values laid out in CSR order of `rows`.
void evaluate_rows_with_gradients(const RowSet& rows, const Vector& x, Vector& values,
                                  std::span<double> jac_values, Exec exec);

struct ComplementarityRecord {
  int lhs_row = -1;      // inequality row a >= 0
  int rhs_row = -1;      // inequality row b >= 0
  int product_row = -1;  // equality row a*b = 0, or inequality row -a*b >= 0
  bool product_is_equality = true;
  std::string name;
};

/// c_E, c_I and their Jacobians (row-major, fixed pattern) at one point.
struct ConstraintValues {
  Vector eq;
  Vector ineq;
};

struct Linearization {
  double objective = 0.0;
  Vector gradient;
  SparseMatrix hessian;
  ConstraintValues c;
  SparseRowMatrix jac_eq;
  SparseRowMatrix jac_ineq;
};

/**
 * min J(x) s.t. c_i(x) = 0 (i in E), c_i(x) >= 0 (i in I).
 *
 * Immutable after construction by ProblemBuilder; safe to share between
 * concurrent solves.
 */
class NlpProblem {
 public:
  int n_vars() const { return layout_.n_vars(); }
  int n_eq() const { return eq_.size(); }
  int n_ineq() const { return ineq_.size(); }
  const VariableLayout& layout() const { return layout_; }
  const Objective& objective() const { return *objective_; }
  const RowSet& eq_rows() const { return eq_; }
  const RowSet& ineq_rows() const { return ineq_; }
  const RowLabel& eq_label(int i) const { return eq_.labels[i]; }
  const RowLabel& ineq_label(int i) const { return ineq_.labels[i]; }
  const std::vector<ComplementarityRecord>& complementarity() const { return comps_; }

  /// Throws NonFiniteEvaluation naming the first offending row.
  ConstraintValues constraints(const Vector& x, Exec exec = Exec::Parallel) const;
  /// Everything the subproblem needs at x. Throws NonFiniteEvaluation.
  Linearization linearize(const Vector& x, Exec exec = Exec::Parallel) const;

  /// Empty row-major Jacobians with the fixed sparsity pattern.
  SparseRowMatrix jacobian_pattern(bool equality) const;

 private:
  friend class ProblemBuilder;
  friend void expand_complementarity(const struct ComplementaritySpec&, class ProblemBuilder&,
                                     const RowLabel&);
  NlpProblem() = default;

  VariableLayout layout_;
  std::shared_ptr<const Objective> objective_;
  RowSet eq_;
  RowSet ineq_;
  std::vector<ComplementarityRecord> comps_;
  SparseRowMatrix pattern_eq_;
  SparseRowMatrix pattern_ineq_;
};

/// Per-constraint penalty weights. Entries only grow during a solve.
struct PenaltyVector {
  Vector eq;
  Vector ineq;
  double mu_max = 1e6;

  static PenaltyVector uniform(int n_eq, int n_ineq, double mu0, double mu_max);
  double max_entry() const;
  double min_entry() const;
};

/// phi_1(x; mu) = J(x) + sum_E mu_i |c_i(x)| + sum_I mu_i [c_i(x)]^-
double eval_merit(const NlpProblem& problem, const Vector& x, const PenaltyVector& mu);
/// Same, reusing already evaluated J and constraint values.
double merit_from_values(double objective, const ConstraintValues& c,
                         const PenaltyVector& mu);

struct ViolationReport {
  double max_eq = 0.0;
  double max_ineq = 0.0;
  Vector per_row;  // |c_E| then [c_I]^-

  double max() const { return std::max(max_eq, max_ineq); }
};

ViolationReport constraint_violation(const NlpProblem& problem, const Vector& x);
ViolationReport violation_from_values(const ConstraintValues& c);

using ExprId = int;
enum class ProductMode { Equality, Inequality };

/// 0 <= a(x) _|_ b(x) >= 0 for two registered expressions.
struct ComplementaritySpec {
  ExprId lhs = -1;
  ExprId rhs = -1;
  ProductMode product_mode = ProductMode::Equality;
};

class ProblemBuilder {
 public:
  explicit ProblemBuilder(VariableLayout layout);

  ExprId add_expression(ScalarFunction f);
  const ScalarFunction& expression(ExprId id) const { return exprs_.at(id); }

  int add_equality(ScalarFunction f, RowLabel label);
  /// f(x) >= 0
  int add_inequality(ScalarFunction f, RowLabel label);
  void add_complementarity(const ComplementaritySpec& spec, RowLabel label);
  void set_objective(std::shared_ptr<const Objective> objective);

  const VariableLayout& layout() const { return problem_.layout_; }
  int n_vars() const { return problem_.n_vars(); }

  /// Validates dimensions and objective Hessian (symmetric, PSD).
  NlpProblem build();

 private:
  friend void expand_complementarity(const ComplementaritySpec&, ProblemBuilder&,
                                     const RowLabel&);
  NlpProblem problem_;
  std::vector<ScalarFunction> exprs_;
  std::set<std::pair<ExprId, ExprId>> pairs_;
};

/// Appends a >= 0, b >= 0 and the product row (a*b = 0, or -a*b >= 0).
/// Throws DuplicateConstraint if the pair was already expanded.
void expand_complementarity(const ComplementaritySpec& spec, ProblemBuilder& builder,
                            const RowLabel& label);

/// Minimum pivot of an LDL' factorization of the objective Hessian at x.
/// PSD within tolerance when the result is >= -1e-10.
double min_hessian_pivot(const Objective& objective, const Vector& x);

struct DerivBlock {
  std::string name;
  double max_error = 0.0;  // relative: |a - fd| / max(1, |a|, |fd|)
  bool pass = true;
  std::vector<int> offending_rows;
  std::vector<std::string> offending_labels;
};

struct DerivReport {
  DerivBlock gradient{"gradient", 0.0, true, {}, {}};
  DerivBlock jac_eq{"jacobian_eq", 0.0, true, {}, {}};
  DerivBlock jac_ineq{"jacobian_ineq", 0.0, true, {}, {}};
  DerivBlock hessian{"hessian", 0.0, true, {}, {}};
  double threshold = 1e-4;

  bool pass() const { return gradient.pass && jac_eq.pass && jac_ineq.pass && hessian.pass; }
  double max_error() const;
};

/// Central finite differences against analytic derivatives.
DerivReport check_derivatives(const NlpProblem& problem, const Vector& x, double h = 1e-6,
                              double threshold = 1e-4);

}  // namespace crisp

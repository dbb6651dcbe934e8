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

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

#include "crisp/nlp.hpp"

namespace crisp {

QuadraticObjective::QuadraticObjective(SparseMatrix hessian, Vector linear, double constant)
    : hessian_(std::move(hessian)), linear_(std::move(linear)), constant_(constant) {
  if (hessian_.rows() != linear_.size() || hessian_.cols() != linear_.size())
    throw std::invalid_argument("QuadraticObjective: dimension mismatch");
  hessian_.makeCompressed();
}

double QuadraticObjective::value(const Vector& x) const {
  const double v = 0.5 * x.dot(hessian_ * x) + linear_.dot(x) + constant_;
  if (!std::isfinite(v)) throw NonFiniteEvaluation("objective", "value");
  return v;
}

Vector QuadraticObjective::gradient(const Vector& x) const {
  Vector g = hessian_ * x + linear_;
  if (!g.allFinite()) throw NonFiniteEvaluation("objective", "gradient");
  return g;
}

void QuadraticCostBuilder::add_tracking(int index, double weight, double reference) {
  if (index < 0 || index >= n_) throw std::out_of_range("QuadraticCostBuilder: index");
  if (weight < 0.0) throw SpecError("QuadraticCostBuilder: negative weight");
  if (weight == 0.0) return;
  entries_.emplace_back(index, index, weight);
  linear_[index] -= weight * reference;
  constant_ += 0.5 * weight * reference * reference;
}

std::shared_ptr<const QuadraticObjective> QuadraticCostBuilder::build() const {
  SparseMatrix h(n_, n_);
  h.setFromTriplets(entries_.begin(), entries_.end());
  return std::make_shared<QuadraticObjective>(std::move(h), linear_, constant_);
}

namespace {

SparseRowMatrix make_pattern(const RowSet& rows, int n) {
  SparseRowMatrix m(rows.size(), n);
  m.resizeNonZeros(rows.nnz());
  std::copy(rows.offsets.begin(), rows.offsets.end(), m.outerIndexPtr());
  int* inner = m.innerIndexPtr();
  for (int i = 0; i < rows.size(); ++i) {
    const auto& d = rows.functions[i].deps();
    for (int d_j : d)
      if (d_j >= n) throw std::invalid_argument("row " + rows.labels[i].str() + " references x beyond n_vars");
    std::copy(d.begin(), d.end(), inner + rows.offsets[i]);
  }
  std::fill(m.valuePtr(), m.valuePtr() + rows.nnz(), 0.0);
  return m;
}

}  // namespace

ConstraintValues NlpProblem::constraints(const Vector& x, Exec exec) const {
  if (x.size() != n_vars()) throw std::invalid_argument("constraints: x has wrong length");
  ConstraintValues c;
  evaluate_rows(eq_, x, c.eq, exec);
  evaluate_rows(ineq_, x, c.ineq, exec);
  return c;
}

Linearization NlpProblem::linearize(const Vector& x, Exec exec) const {
  if (x.size() != n_vars()) throw std::invalid_argument("linearize: x has wrong length");
  Linearization lin;
  lin.objective = objective_->value(x);
  lin.gradient = objective_->gradient(x);
  lin.hessian = objective_->hessian(x);
  lin.jac_eq = pattern_eq_;
  lin.jac_ineq = pattern_ineq_;
  evaluate_rows_with_gradients(eq_, x, lin.c.eq,
                               std::span<double>(lin.jac_eq.valuePtr(), eq_.nnz()), exec);
  evaluate_rows_with_gradients(ineq_, x, lin.c.ineq,
                               std::span<double>(lin.jac_ineq.valuePtr(), ineq_.nnz()), exec);
  return lin;
}

SparseRowMatrix NlpProblem::jacobian_pattern(bool equality) const {
  return equality ? pattern_eq_ : pattern_ineq_;
}

PenaltyVector PenaltyVector::uniform(int n_eq, int n_ineq, double mu0, double mu_max) {
  if (!(mu0 > 0.0) || mu0 > mu_max) throw std::invalid_argument("PenaltyVector: need 0 < mu0 <= mu_max");
  return PenaltyVector{Vector::Constant(n_eq, mu0), Vector::Constant(n_ineq, mu0), mu_max};
}

double PenaltyVector::max_entry() const {
  double m = 0.0;
  if (eq.size()) m = std::max(m, eq.maxCoeff());
  if (ineq.size()) m = std::max(m, ineq.maxCoeff());
  return m;
}

double PenaltyVector::min_entry() const {
  double m = mu_max;
  if (eq.size()) m = std::min(m, eq.minCoeff());
  if (ineq.size()) m = std::min(m, ineq.minCoeff());
  return m;
}

double merit_from_values(double objective, const ConstraintValues& c, const PenaltyVector& mu) {
  if (mu.eq.size() != c.eq.size() || mu.ineq.size() != c.ineq.size())
    throw std::invalid_argument("merit: penalty dimensions do not match constraints");
  double penalty = 0.0;
  for (Eigen::Index i = 0; i < c.eq.size(); ++i) penalty += mu.eq[i] * std::abs(c.eq[i]);
  for (Eigen::Index i = 0; i < c.ineq.size(); ++i) penalty += mu.ineq[i] * std::max(0.0, -c.ineq[i]);
  return objective + penalty;
}

double eval_merit(const NlpProblem& problem, const Vector& x, const PenaltyVector& mu) {
  return merit_from_values(problem.objective().value(x), problem.constraints(x), mu);
}

ViolationReport violation_from_values(const ConstraintValues& c) {
  ViolationReport r;
  r.per_row.resize(c.eq.size() + c.ineq.size());
  for (Eigen::Index i = 0; i < c.eq.size(); ++i) {
    r.per_row[i] = std::abs(c.eq[i]);
    r.max_eq = std::max(r.max_eq, r.per_row[i]);
  }
  for (Eigen::Index i = 0; i < c.ineq.size(); ++i) {
    const double v = std::max(0.0, -c.ineq[i]);
    r.per_row[c.eq.size() + i] = v;
    r.max_ineq = std::max(r.max_ineq, v);
  }
  return r;
}

ViolationReport constraint_violation(const NlpProblem& problem, const Vector& x) {
  return violation_from_values(problem.constraints(x));
}

ProblemBuilder::ProblemBuilder(VariableLayout layout) {
  if (layout.horizon < 1 || layout.names.empty() || layout.names.size() != layout.kinds.size())
    throw SpecError("ProblemBuilder: invalid variable layout");
  if (!(layout.dt > 0.0)) throw SpecError("ProblemBuilder: dt must be positive");
  problem_.layout_ = std::move(layout);
}

ExprId ProblemBuilder::add_expression(ScalarFunction f) {
  if (!f.valid()) throw std::invalid_argument("add_expression: invalid function");
  exprs_.push_back(std::move(f));
  return static_cast<ExprId>(exprs_.size() - 1);
}

int ProblemBuilder::add_equality(ScalarFunction f, RowLabel label) {
  problem_.eq_.push_back(std::move(f), std::move(label));
  return problem_.eq_.size() - 1;
}

int ProblemBuilder::add_inequality(ScalarFunction f, RowLabel label) {
  problem_.ineq_.push_back(std::move(f), std::move(label));
  return problem_.ineq_.size() - 1;
}

void ProblemBuilder::add_complementarity(const ComplementaritySpec& spec, RowLabel label) {
  expand_complementarity(spec, *this, label);
}

void ProblemBuilder::set_objective(std::shared_ptr<const Objective> objective) {
  if (!objective) throw std::invalid_argument("set_objective: null objective");
  problem_.objective_ = std::move(objective);
}

void expand_complementarity(const ComplementaritySpec& spec, ProblemBuilder& builder,
                            const RowLabel& label) {
  const int n_expr = static_cast<int>(builder.exprs_.size());
  if (spec.lhs < 0 || spec.lhs >= n_expr || spec.rhs < 0 || spec.rhs >= n_expr)
    throw std::invalid_argument("expand_complementarity: unregistered expression in " + label.str());
  const auto key = std::minmax(spec.lhs, spec.rhs);
  if (!builder.pairs_.insert({key.first, key.second}).second)
    throw DuplicateConstraint("complementarity pair already expanded: " + label.str());

  const ScalarFunction& a = builder.exprs_[spec.lhs];
  const ScalarFunction& b = builder.exprs_[spec.rhs];
  auto sub = [&](const char* suffix) {
    return RowLabel{RowCategory::Complementarity, label.name + suffix, label.step};
  };

  ComplementarityRecord rec;
  rec.name = label.name;
  rec.lhs_row = builder.add_inequality(a, sub(".lhs"));
  rec.rhs_row = builder.add_inequality(b, sub(".rhs"));
  if (spec.product_mode == ProductMode::Equality) {
    rec.product_row = builder.add_equality(ScalarFunction::product(a, b), sub(".product"));
    rec.product_is_equality = true;
  } else {
    rec.product_row = builder.add_inequality(ScalarFunction::product(a, b, -1.0), sub(".product"));
    rec.product_is_equality = false;
  }
  builder.problem_.comps_.push_back(std::move(rec));
}

double min_hessian_pivot(const Objective& objective, const Vector& x) {
  SparseMatrix h = objective.hessian(x);
  const int n = static_cast<int>(h.rows());
  if (n == 0) return 0.0;

  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt(h);
  if (ldlt.info() == Eigen::Success) return ldlt.vectorD().minCoeff();

  // Singular PSD matrices hit an exact zero pivot; retry with a tiny shift
  // and report the shifted pivot.
  constexpr double shift = 1e-10;
  SparseMatrix eye(n, n);
  eye.setIdentity();
  SparseMatrix shifted = h + shift * eye;
  ldlt.compute(shifted);
  if (ldlt.info() == Eigen::Success) return ldlt.vectorD().minCoeff() - shift;

  if (n <= 2000) {
    const Eigen::LDLT<Matrix> dense{Matrix(h)};
    return dense.vectorD().minCoeff();
  }
  return -kInf;
}

NlpProblem ProblemBuilder::build() {
  NlpProblem& p = problem_;
  const int n = p.n_vars();
  if (!p.objective_) throw std::invalid_argument("ProblemBuilder: objective not set");
  if (p.objective_->n_vars() != n)
    throw std::invalid_argument("ProblemBuilder: objective dimension does not match layout");

  p.pattern_eq_ = make_pattern(p.eq_, n);
  p.pattern_ineq_ = make_pattern(p.ineq_, n);

  const Vector x0 = Vector::Zero(n);
  SparseMatrix h = p.objective_->hessian(x0);
  if (h.rows() != n || h.cols() != n) throw std::invalid_argument("ProblemBuilder: Hessian shape");
  SparseMatrix asym = SparseMatrix(h.transpose()) - h;
  for (int k = 0; k < asym.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(asym, k); it; ++it)
      if (std::abs(it.value()) > 1e-12) throw std::invalid_argument("ProblemBuilder: Hessian not symmetric");
  if (min_hessian_pivot(*p.objective_, x0) < -1e-10)
    throw std::invalid_argument("ProblemBuilder: objective Hessian is not positive semidefinite");

  return std::move(problem_);
}

}  // namespace crisp

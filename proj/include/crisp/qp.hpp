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

#include "crisp/nlp.hpp"

namespace crisp {

/// Half-open index range [begin, begin + size).
struct Slice {
  int begin = 0;
  int size = 0;
  int end() const { return begin + size; }
};

/// Index ranges of z = (p, v, w, t).
struct SliceMap {
  Slice p, v, w, t;
};

/// Linearization data kept alongside the QP so the nonsmooth model and the
/// second-order correction can be evaluated without re-linearizing.
struct LinearModel {
  double objective = 0.0;
  Vector gradient;
  SparseMatrix hessian;
  Vector c_eq;    // constant terms of the linearized equalities
  Vector c_ineq;  // constant terms of the linearized inequalities
  SparseRowMatrix jac_eq;
  SparseRowMatrix jac_ineq;
  PenaltyVector mu;
};

/**
 * min 0.5 z'Pz + q'z + constant
 * s.t. A_eq z = b_eq, A_ineq z >= b_ineq, lb <= z <= ub.
 *
 * P holds the full symmetric matrix. Infinite bounds are allowed.
 */
struct QpData {
  SparseMatrix P;
  Vector q;
  double constant = 0.0;
  SparseMatrix A_eq;
  Vector b_eq;
  SparseMatrix A_ineq;
  Vector b_ineq;
  Vector lb;
  Vector ub;

  SliceMap slices;
  LinearModel model;  // empty for QPs not built from an NLP

  int n() const { return static_cast<int>(q.size()); }
  int m_eq() const { return static_cast<int>(b_eq.size()); }
  int m_ineq() const { return static_cast<int>(b_ineq.size()); }
  double objective(const Vector& z) const { return 0.5 * z.dot(P * z) + q.dot(z) + constant; }
  /// Throws std::invalid_argument on inconsistent dimensions or lb > ub.
  void validate() const;
};

/// Elastic trust-region subproblem at x_k. `hess_reg` adds hess_reg * I to
/// the p-slice of P.
QpData build_subproblem(const NlpProblem& problem, const Vector& x_k, const PenaltyVector& mu,
                        double delta, double hess_reg = 0.0);
/// Same, from an existing linearization.
QpData build_subproblem(const Linearization& lin, const PenaltyVector& mu, double delta,
                        double hess_reg = 0.0);

/// Canonical feasible point (p = 0, v = [c]^+, w = [c]^-, t = [c]^-).
Vector canonical_point(const QpData& qp);

/// q_{mu,k}(p): quadratic objective model plus weighted l1 model penalties.
double model_value(const QpData& qp, const Vector& p);
/// Convenience overload matching the NLP-level call shape. `problem`, `x_k`
/// and `mu` must be the ones `qp` was built from.
double model_value(const QpData& qp, const NlpProblem& problem, const Vector& x_k,
                   const PenaltyVector& mu, const Vector& p);
/// q(0) - q(p) accumulated term by term.
double predicted_reduction(const QpData& qp, const Vector& p);

/// Replaces every constant term c_i by c_i + d_i with
/// d_i = c_i(x_k + p) - c_i(x_k) - grad c_i(x_k)' p. Throws NonFiniteEvaluation.
QpData apply_second_order_correction(const QpData& qp, const NlpProblem& problem, const Vector& x_k,
                                     const Vector& p_trial);

/// Trial step p extracted from a QP solution vector.
inline Vector extract_step(const QpData& qp, const Vector& z) {
  return z.segment(qp.slices.p.begin, qp.slices.p.size);
}

}  // namespace crisp

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

// Brute-force active-set enumeration for tiny QPs. For a convex QP the first
// candidate that is both primal and dual feasible is a global optimum.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "crisp/qp_solver.hpp"

namespace crisp {

namespace {

enum class RowKind { Ineq, Lower, Upper };

struct Row {
  RowKind kind;
  int index;
};

bool next_combination(std::vector<int>& idx, int total) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == total - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

}  // namespace

QpSolution solve_qp_oracle(const QpData& qp) {
  qp.validate();
  const int n = qp.n();
  const int me = qp.m_eq();
  const int mi = qp.m_ineq();

  std::vector<Row> rows;
  for (int i = 0; i < mi; ++i) rows.push_back({RowKind::Ineq, i});
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(qp.lb[j])) rows.push_back({RowKind::Lower, j});
    if (std::isfinite(qp.ub[j])) rows.push_back({RowKind::Upper, j});
  }
  const int total = static_cast<int>(rows.size());
  if (me + total > kOracleMaxConstraints)
    throw ProblemTooLarge("oracle: " + std::to_string(me + total) + " constraints exceed the limit of " +
                          std::to_string(kOracleMaxConstraints));

  const Matrix P = Matrix(qp.P);
  const Matrix Ae = me ? Matrix(qp.A_eq) : Matrix(0, n);
  const Matrix Ai = mi ? Matrix(qp.A_ineq) : Matrix(0, n);

  // Every inequality-type row as c'z >= h.
  Matrix C(total, n);
  Vector h(total);
  for (int r = 0; r < total; ++r) {
    C.row(r).setZero();
    const Row& row = rows[r];
    switch (row.kind) {
      case RowKind::Ineq:
        C.row(r) = Ai.row(row.index);
        h[r] = qp.b_ineq[row.index];
        break;
      case RowKind::Lower:
        C(r, row.index) = 1.0;
        h[r] = qp.lb[row.index];
        break;
      case RowKind::Upper:
        C(r, row.index) = -1.0;
        h[r] = -qp.ub[row.index];
        break;
    }
  }

  QpSolution best;
  best.status = QpStatus::NumericalFailure;
  double best_obj = kInf;
  bool best_dual_ok = false;
  int evaluated = 0;

  auto consider = [&](const std::vector<int>& act) -> bool {
    const int r = static_cast<int>(act.size());
    const int m = me + r;
    Matrix K = Matrix::Zero(n + m, n + m);
    Vector rhs(n + m);
    K.topLeftCorner(n, n) = P;
    rhs.head(n) = -qp.q;
    for (int i = 0; i < me; ++i) {
      K.block(n + i, 0, 1, n) = Ae.row(i);
      rhs[n + i] = qp.b_eq[i];
    }
    for (int a = 0; a < r; ++a) {
      K.block(n + me + a, 0, 1, n) = C.row(act[a]);
      rhs[n + me + a] = h[act[a]];
    }
    K.topRightCorner(n, m) = K.bottomLeftCorner(m, n).transpose();
    ++evaluated;

    Vector sol;
    Eigen::FullPivLU<Matrix> lu(K);
    if (lu.isInvertible()) {
      sol = lu.solve(rhs);
    } else {
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
      sol = cod.solve(rhs);
      if ((K * sol - rhs).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff())) return false;
    }
    const Vector z = sol.head(n);
    const Vector mult = -sol.tail(m);

    const double ptol = 1e-9;
    for (int k = 0; k < total; ++k)
      if (C.row(k).dot(z) < h[k] - ptol * (1.0 + std::abs(h[k]))) return false;
    bool dual_ok = true;
    for (int a = 0; a < r; ++a)
      if (mult[me + a] < -1e-9) dual_ok = false;

    const double obj = qp.objective(z);
    if ((dual_ok && !best_dual_ok) || (dual_ok == best_dual_ok && obj < best_obj)) {
      best_obj = obj;
      best_dual_ok = dual_ok;
      best.z = z;
      best.y_eq = mult.head(me);
      best.y_ineq = Vector::Zero(mi);
      best.y_bounds = Vector::Zero(n);
      for (int a = 0; a < r; ++a) {
        const Row& row = rows[act[a]];
        const double v = mult[me + a];
        if (row.kind == RowKind::Ineq) best.y_ineq[row.index] = v;
        else if (row.kind == RowKind::Lower) best.y_bounds[row.index] += v;
        else best.y_bounds[row.index] -= v;
      }
      best.status = QpStatus::Optimal;
    }
    return dual_ok;
  };

  bool done = false;
  for (int k = 0; k <= std::min(n, total) && !done; ++k) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    do {
      bool clash = false;
      for (int a = 0; a < k && !clash; ++a)
        for (int b = a + 1; b < k; ++b)
          if (rows[idx[a]].kind != RowKind::Ineq && rows[idx[b]].kind != RowKind::Ineq &&
              rows[idx[a]].index == rows[idx[b]].index) {
            clash = true;
            break;
          }
      if (!clash && consider(idx)) {
        done = true;
        break;
      }
    } while (next_combination(idx, total));
  }

  best.iterations = evaluated;
  if (best.status == QpStatus::Optimal) best.kkt = kkt_residuals(qp, best);
  return best;
}

}  // namespace crisp

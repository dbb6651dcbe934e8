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

// Test-side oracles and generators. Nothing here calls into the code under
// test except to build inputs.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "crisp/nlp.hpp"
#include "crisp/qp.hpp"
#include "crisp/qp_solver.hpp"

namespace crisp::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Matrix dense(const SparseMatrix& a) { return Matrix(a); }

/// Random dense convex QP with a known strictly feasible point. `rank` < n
/// gives a PSD but singular Hessian; the box then keeps the problem bounded.
inline QpData random_qp(Rng& rng, int n, int m_eq, int m_ineq, int rank = -1, bool boxed = true) {
  if (rank < 0) rank = n;
  Matrix L = Matrix::Zero(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) L(i, j) = uniform(rng, -1.0, 1.0);
  Matrix P = L * L.transpose();
  Vector z0(n);
  for (int i = 0; i < n; ++i) z0[i] = uniform(rng, -0.5, 0.5);

  QpData qp;
  qp.P = P.sparseView();
  qp.q.resize(n);
  for (int i = 0; i < n; ++i) qp.q[i] = uniform(rng, -2.0, 2.0);
  Matrix Ae(m_eq, n), Ai(m_ineq, n);
  for (int i = 0; i < m_eq; ++i)
    for (int j = 0; j < n; ++j) Ae(i, j) = uniform(rng, -1.0, 1.0);
  for (int i = 0; i < m_ineq; ++i)
    for (int j = 0; j < n; ++j) Ai(i, j) = uniform(rng, -1.0, 1.0);
  qp.A_eq = Ae.sparseView();
  qp.A_ineq = Ai.sparseView();
  qp.b_eq = Ae * z0;
  qp.b_ineq = Ai * z0 - Vector::NullaryExpr(m_ineq, [&](Eigen::Index) { return uniform(rng, 0.0, 0.5); });
  qp.lb = Vector::Constant(n, -kInf);
  qp.ub = Vector::Constant(n, kInf);
  if (boxed) {
    for (int j = 0; j < n; ++j) {
      qp.lb[j] = z0[j] - uniform(rng, 0.1, 1.0);
      qp.ub[j] = z0[j] + uniform(rng, 0.1, 1.0);
    }
  }
  qp.slices.p = {0, n};
  return qp;
}

struct OracleResult {
  Vector z;
  double objective = std::numeric_limits<double>::infinity();
  bool found = false;
};

/// Brute-force optimum: every subset of inequality rows and finite bounds is
/// tried as the active set; the KKT system on that set is solved densely and
/// the candidate kept if it is primal and dual feasible.
inline OracleResult enumerate_active_sets(const QpData& qp, double feas_tol = 1e-9) {
  const int n = qp.n(), me = qp.m_eq(), mi = qp.m_ineq();
  const Matrix P = dense(qp.P), Ae = dense(qp.A_eq), Ai = dense(qp.A_ineq);

  // Candidate constraints: inequality rows, then lower and upper bounds.
  struct Cand {
    Vector a;
    double b;
    double sign;  // multiplier must have this sign
  };
  std::vector<Cand> cands;
  for (int i = 0; i < mi; ++i) cands.push_back({Ai.row(i).transpose(), qp.b_ineq[i], 1.0});
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(qp.lb[j])) cands.push_back({Vector::Unit(n, j), qp.lb[j], 1.0});
    if (std::isfinite(qp.ub[j])) cands.push_back({-Vector::Unit(n, j), -qp.ub[j], 1.0});
  }
  const int nc = static_cast<int>(cands.size());
  OracleResult best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nc); ++mask) {
    std::vector<int> act;
    for (int c = 0; c < nc; ++c)
      if (mask >> c & 1) act.push_back(c);
    const int m = me + static_cast<int>(act.size());
    if (m > n) continue;
    Matrix K = Matrix::Zero(n + m, n + m);
    Vector rhs = Vector::Zero(n + m);
    K.topLeftCorner(n, n) = P;
    rhs.head(n) = -qp.q;
    for (int i = 0; i < me; ++i) {
      K.block(n + i, 0, 1, n) = Ae.row(i);
      K.block(0, n + i, n, 1) = -Ae.row(i).transpose();
      rhs[n + i] = qp.b_eq[i];
    }
    for (int k = 0; k < static_cast<int>(act.size()); ++k) {
      const Cand& c = cands[act[k]];
      K.block(n + me + k, 0, 1, n) = c.a.transpose();
      K.block(0, n + me + k, n, 1) = -c.a;
      rhs[n + me + k] = c.b;
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
    const Vector sol = cod.solve(rhs);
    if ((K * sol - rhs).cwiseAbs().maxCoeff() > 1e-8) continue;
    const Vector z = sol.head(n);
    bool ok = true;
    for (int k = 0; k < static_cast<int>(act.size()) && ok; ++k) ok = sol[n + me + k] >= -feas_tol;
    if (!ok) continue;
    if (me && (Ae * z - qp.b_eq).cwiseAbs().maxCoeff() > feas_tol) continue;
    if (mi && (Ai * z - qp.b_ineq).minCoeff() < -feas_tol) continue;
    for (int j = 0; j < n && ok; ++j) ok = z[j] >= qp.lb[j] - feas_tol && z[j] <= qp.ub[j] + feas_tol;
    if (!ok) continue;
    const double f = 0.5 * z.dot(P * z) + qp.q.dot(z) + qp.constant;
    if (f < best.objective) {
      best.objective = f;
      best.z = z;
      best.found = true;
    }
  }
  return best;
}

/// Independent KKT residuals: primal infeasibility, stationarity plus dual
/// sign violations, and the largest complementarity product.
inline KktResiduals independent_kkt(const QpData& qp, const QpSolution& s) {
  const Matrix P = dense(qp.P), Ae = dense(qp.A_eq), Ai = dense(qp.A_ineq);
  const Vector& z = s.z;
  KktResiduals r;
  if (qp.m_eq()) r.primal_res = (Ae * z - qp.b_eq).cwiseAbs().maxCoeff();
  const Vector slack = qp.m_ineq() ? Vector(Ai * z - qp.b_ineq) : Vector();
  if (qp.m_ineq()) r.primal_res = std::max(r.primal_res, (-slack).cwiseMax(0.0).maxCoeff());
  for (int j = 0; j < qp.n(); ++j)
    r.primal_res = std::max({r.primal_res, qp.lb[j] - z[j], z[j] - qp.ub[j]});
  Vector stat = P * z + qp.q - s.y_bounds;
  if (qp.m_eq()) stat -= Ae.transpose() * s.y_eq;
  if (qp.m_ineq()) stat -= Ai.transpose() * s.y_ineq;
  r.dual_res = stat.cwiseAbs().maxCoeff();
  for (int i = 0; i < qp.m_ineq(); ++i) {
    r.dual_res = std::max(r.dual_res, -s.y_ineq[i]);
    r.gap = std::max(r.gap, std::abs(s.y_ineq[i] * slack[i]));
  }
  for (int j = 0; j < qp.n(); ++j) {
    const double y = s.y_bounds[j];
    if (y > 0.0) r.gap = std::max(r.gap, std::isfinite(qp.lb[j]) ? y * (z[j] - qp.lb[j]) : y);
    if (y < 0.0) r.gap = std::max(r.gap, std::isfinite(qp.ub[j]) ? -y * (qp.ub[j] - z[j]) : -y);
  }
  return r;
}

/// Central-difference gradient of a scalar function of x.
template <class F>
Vector fd_gradient(F&& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Row kinds used by random_nlp: every row is a polynomial of degree <= 2.
inline ScalarFunction random_row(Rng& rng, int n) {
  const int a = uniform_int(rng, 0, n - 1);
  int b = uniform_int(rng, 0, n - 1);
  if (b == a) b = (a + 1) % n;
  const double off = uniform(rng, -1.0, 1.0);
  switch (uniform_int(rng, 0, 2)) {
    case 0:
      return ScalarFunction::affine({{a, uniform(rng, -2.0, 2.0)}, {b, uniform(rng, -2.0, 2.0)}}, off);
    case 1:
      return ScalarFunction::product(ScalarFunction::affine({{a, 1.0}}, off), ScalarFunction::variable(b),
                                     uniform(rng, 0.5, 2.0));
    default: {
      const double c = uniform(rng, 0.5, 2.0);
      return ScalarFunction({a, b}, [a, b, c, off](const double* x, double* g) {
        if (g) {
          g[0] = 2.0 * c * x[a];
          g[1] = -1.0;
        }
        return c * x[a] * x[a] - x[b] + off;
      });
    }
  }
}

/// Small random NLP: convex quadratic objective, equality and inequality
/// rows of degree <= 2, optionally one complementarity pair.
inline NlpProblem random_nlp(Rng& rng, int n, int m_eq, int m_ineq, bool with_pair = true) {
  VariableLayout layout;
  layout.horizon = 1;
  for (int i = 0; i < n; ++i) layout.add("x" + std::to_string(i), VarKind::State);
  ProblemBuilder b(layout);
  QuadraticCostBuilder cost(n);
  for (int i = 0; i < n; ++i) cost.add_tracking(i, uniform(rng, 0.1, 2.0), uniform(rng, -1.0, 1.0));
  b.set_objective(cost.build());
  for (int i = 0; i < m_eq; ++i) b.add_equality(random_row(rng, n), {RowCategory::Other, "eq", i});
  for (int i = 0; i < m_ineq; ++i) b.add_inequality(random_row(rng, n), {RowCategory::Other, "ineq", i});
  if (with_pair && n >= 2) {
    const ExprId a = b.add_expression(ScalarFunction::variable(0));
    const ExprId c = b.add_expression(ScalarFunction::affine({{1, 1.0}}, 0.5));
    b.add_complementarity({a, c, ProductMode::Equality}, {RowCategory::Complementarity, "pair", 0});
  }
  return b.build();
}

inline Vector random_vector(Rng& rng, int n, double scale = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(rng, -scale, scale);
  return v;
}

}  // namespace crisp::testing

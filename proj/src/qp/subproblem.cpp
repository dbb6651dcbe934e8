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

#include <cmath>
#include <stdexcept>

#include "crisp/qp.hpp"

namespace crisp {

void QpData::validate() const {
  const int nz = n();
  if (P.rows() != nz || P.cols() != nz) throw std::invalid_argument("QpData: P shape");
  if (A_eq.rows() != b_eq.size() || (A_eq.rows() > 0 && A_eq.cols() != nz))
    throw std::invalid_argument("QpData: A_eq shape");
  if (A_ineq.rows() != b_ineq.size() || (A_ineq.rows() > 0 && A_ineq.cols() != nz))
    throw std::invalid_argument("QpData: A_ineq shape");
  if (lb.size() != nz || ub.size() != nz) throw std::invalid_argument("QpData: bound length");
  for (int j = 0; j < nz; ++j)
    if (lb[j] > ub[j]) throw std::invalid_argument("QpData: lb > ub at " + std::to_string(j));
}

QpData build_subproblem(const Linearization& lin, const PenaltyVector& mu, double delta,
                        double hess_reg) {
  if (!(delta > 0.0)) throw std::invalid_argument("build_subproblem: delta must be positive");
  const int n = static_cast<int>(lin.gradient.size());
  const int m_e = static_cast<int>(lin.c.eq.size());
  const int m_i = static_cast<int>(lin.c.ineq.size());
  if (mu.eq.size() != m_e || mu.ineq.size() != m_i)
    throw std::invalid_argument("build_subproblem: penalty dimensions");
  const int nz = n + 2 * m_e + m_i;

  QpData qp;
  qp.slices.p = {0, n};
  qp.slices.v = {n, m_e};
  qp.slices.w = {n + m_e, m_e};
  qp.slices.t = {n + 2 * m_e, m_i};

  std::vector<Triplet> trip;
  trip.reserve(lin.hessian.nonZeros() + (hess_reg > 0.0 ? n : 0));
  for (int k = 0; k < lin.hessian.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(lin.hessian, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  if (hess_reg > 0.0)
    for (int j = 0; j < n; ++j) trip.emplace_back(j, j, hess_reg);
  qp.P.resize(nz, nz);
  qp.P.setFromTriplets(trip.begin(), trip.end());

  qp.q.resize(nz);
  qp.q.head(n) = lin.gradient;
  qp.q.segment(qp.slices.v.begin, m_e) = mu.eq;
  qp.q.segment(qp.slices.w.begin, m_e) = mu.eq;
  qp.q.segment(qp.slices.t.begin, m_i) = mu.ineq;
  qp.constant = lin.objective;

  trip.clear();
  trip.reserve(lin.jac_eq.nonZeros() + 2 * m_e);
  for (int i = 0; i < m_e; ++i) {
    for (SparseRowMatrix::InnerIterator it(lin.jac_eq, i); it; ++it)
      trip.emplace_back(i, static_cast<int>(it.col()), it.value());
    trip.emplace_back(i, qp.slices.v.begin + i, -1.0);
    trip.emplace_back(i, qp.slices.w.begin + i, 1.0);
  }
  qp.A_eq.resize(m_e, nz);
  qp.A_eq.setFromTriplets(trip.begin(), trip.end());
  qp.b_eq = -lin.c.eq;

  trip.clear();
  trip.reserve(lin.jac_ineq.nonZeros() + m_i);
  for (int i = 0; i < m_i; ++i) {
    for (SparseRowMatrix::InnerIterator it(lin.jac_ineq, i); it; ++it)
      trip.emplace_back(i, static_cast<int>(it.col()), it.value());
    trip.emplace_back(i, qp.slices.t.begin + i, 1.0);
  }
  qp.A_ineq.resize(m_i, nz);
  qp.A_ineq.setFromTriplets(trip.begin(), trip.end());
  qp.b_ineq = -lin.c.ineq;

  qp.lb = Vector::Zero(nz);
  qp.ub = Vector::Constant(nz, kInf);
  qp.lb.head(n).setConstant(-delta);
  qp.ub.head(n).setConstant(delta);

  qp.model.objective = lin.objective;
  qp.model.gradient = lin.gradient;
  qp.model.hessian = lin.hessian;
  qp.model.c_eq = lin.c.eq;
  qp.model.c_ineq = lin.c.ineq;
  qp.model.jac_eq = lin.jac_eq;
  qp.model.jac_ineq = lin.jac_ineq;
  qp.model.mu = mu;
  return qp;
}

QpData build_subproblem(const NlpProblem& problem, const Vector& x_k, const PenaltyVector& mu,
                        double delta, double hess_reg) {
  return build_subproblem(problem.linearize(x_k), mu, delta, hess_reg);
}

Vector canonical_point(const QpData& qp) {
  Vector z = Vector::Zero(qp.n());
  const auto& s = qp.slices;
  for (int i = 0; i < s.v.size; ++i) {
    const double c = qp.model.c_eq[i];
    z[s.v.begin + i] = std::max(0.0, c);
    z[s.w.begin + i] = std::max(0.0, -c);
  }
  for (int i = 0; i < s.t.size; ++i) z[s.t.begin + i] = std::max(0.0, -qp.model.c_ineq[i]);
  return z;
}

double model_value(const QpData& qp, const Vector& p) {
  const LinearModel& m = qp.model;
  if (p.size() != m.gradient.size()) throw std::invalid_argument("model_value: p has wrong length");
  double v = m.objective + m.gradient.dot(p) + 0.5 * p.dot(m.hessian * p);
  const Vector le = m.c_eq + m.jac_eq * p;
  const Vector li = m.c_ineq + m.jac_ineq * p;
  for (Eigen::Index i = 0; i < le.size(); ++i) v += m.mu.eq[i] * std::abs(le[i]);
  for (Eigen::Index i = 0; i < li.size(); ++i) v += m.mu.ineq[i] * std::max(0.0, -li[i]);
  return v;
}

double model_value(const QpData& qp, const NlpProblem& problem, const Vector& x_k,
                   const PenaltyVector& mu, const Vector& p) {
  if (x_k.size() != problem.n_vars() || mu.eq.size() != problem.n_eq() ||
      mu.ineq.size() != problem.n_ineq())
    throw std::invalid_argument("model_value: arguments do not match the problem");
  return model_value(qp, p);
}

double predicted_reduction(const QpData& qp, const Vector& p) {
  const LinearModel& m = qp.model;
  if (p.size() != m.gradient.size())
    throw std::invalid_argument("predicted_reduction: p has wrong length");
  double pred = -(m.gradient.dot(p) + 0.5 * p.dot(m.hessian * p));
  const Vector dje = m.jac_eq * p;
  const Vector dji = m.jac_ineq * p;
  for (Eigen::Index i = 0; i < dje.size(); ++i)
    pred += m.mu.eq[i] * (std::abs(m.c_eq[i]) - std::abs(m.c_eq[i] + dje[i]));
  for (Eigen::Index i = 0; i < dji.size(); ++i)
    pred += m.mu.ineq[i] * (std::max(0.0, -m.c_ineq[i]) - std::max(0.0, -(m.c_ineq[i] + dji[i])));
  return pred;
}

QpData apply_second_order_correction(const QpData& qp, const NlpProblem& problem, const Vector& x_k,
                                     const Vector& p_trial) {
  if (x_k.size() != problem.n_vars() || p_trial.size() != problem.n_vars())
    throw std::invalid_argument("apply_second_order_correction: dimension mismatch");
  const ConstraintValues trial = problem.constraints(x_k + p_trial);
  const Vector d_eq = trial.eq - qp.model.c_eq - qp.model.jac_eq * p_trial;
  const Vector d_ineq = trial.ineq - qp.model.c_ineq - qp.model.jac_ineq * p_trial;

  QpData out = qp;
  out.model.c_eq += d_eq;
  out.model.c_ineq += d_ineq;
  out.b_eq = -out.model.c_eq;
  out.b_ineq = -out.model.c_ineq;
  return out;
}

}  // namespace crisp

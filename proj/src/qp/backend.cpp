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
#include <string>

#include "backends.hpp"
#include "crisp/qp_solver.hpp"

namespace crisp {

namespace {

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

class OracleBackend final : public QpBackend {
 public:
  std::string_view name() const override { return "oracle"; }
  QpSolution solve(const QpData& qp, const QpSettings&, const QpSolution*) override {
    return solve_qp_oracle(qp);
  }
};

}  // namespace

std::string_view to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "Optimal";
    case QpStatus::MaxIter: return "MaxIter";
    case QpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "NumericalFailure";
}

double kkt_scale(const QpData& qp) {
  return std::max({1.0, inf_norm(qp.q), inf_norm(qp.b_eq), inf_norm(qp.b_ineq)});
}

KktResiduals kkt_residuals(const QpData& qp, const QpSolution& sol) {
  const int n = qp.n();
  if (sol.z.size() != n || sol.y_eq.size() != qp.m_eq() || sol.y_ineq.size() != qp.m_ineq() ||
      sol.y_bounds.size() != n)
    throw std::invalid_argument("kkt_residuals: solution dimensions do not match the QP");
  KktResiduals r;

  Vector ax_e = qp.m_eq() ? Vector(qp.A_eq * sol.z) : Vector(0);
  Vector ax_i = qp.m_ineq() ? Vector(qp.A_ineq * sol.z) : Vector(0);
  r.primal_res = inf_norm(ax_e - qp.b_eq);
  for (int i = 0; i < qp.m_ineq(); ++i) r.primal_res = std::max(r.primal_res, qp.b_ineq[i] - ax_i[i]);
  for (int j = 0; j < n; ++j) {
    r.primal_res = std::max(r.primal_res, qp.lb[j] - sol.z[j]);
    r.primal_res = std::max(r.primal_res, sol.z[j] - qp.ub[j]);
  }

  Vector stat = qp.P * sol.z + qp.q - sol.y_bounds;
  if (qp.m_eq()) stat -= qp.A_eq.transpose() * sol.y_eq;
  if (qp.m_ineq()) stat -= qp.A_ineq.transpose() * sol.y_ineq;
  r.dual_res = inf_norm(stat);
  for (int i = 0; i < qp.m_ineq(); ++i) {
    r.dual_res = std::max(r.dual_res, -sol.y_ineq[i]);
    r.gap = std::max(r.gap, std::abs(sol.y_ineq[i] * (ax_i[i] - qp.b_ineq[i])));
  }
  for (int j = 0; j < n; ++j) {
    const double yb = sol.y_bounds[j];
    if (yb > 0.0) {
      if (std::isfinite(qp.lb[j])) r.gap = std::max(r.gap, std::abs(yb * (sol.z[j] - qp.lb[j])));
      else r.dual_res = std::max(r.dual_res, yb);
    } else if (yb < 0.0) {
      if (std::isfinite(qp.ub[j])) r.gap = std::max(r.gap, std::abs(yb * (qp.ub[j] - sol.z[j])));
      else r.dual_res = std::max(r.dual_res, -yb);
    }
  }
  return r;
}

std::unique_ptr<QpBackend> make_qp_backend(std::string_view name) {
  if (name == "reference") return detail::make_interior_point_backend();
  if (name == "oracle") return std::make_unique<OracleBackend>();
  throw std::invalid_argument("unknown QP backend '" + std::string(name) + "'");
}

QpSolution solve_qp(const QpData& qp, double tol, const std::optional<QpSolution>& warm_start) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_qp: tol must be positive");
  auto backend = detail::make_interior_point_backend();
  QpSettings st;
  st.tol = tol;
  return backend->solve(qp, st, warm_start ? &*warm_start : nullptr);
}

}  // namespace crisp

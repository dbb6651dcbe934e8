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

#include <algorithm>
#include <array>
#include <cmath>

#include "crisp/nlp.hpp"

namespace crisp {

namespace {

double rel_error(double analytic, double fd) {
  return std::abs(analytic - fd) / std::max({1.0, std::abs(analytic), std::abs(fd)});
}

void record(DerivBlock& block, double err, double threshold, int row, const std::string& label) {
  block.max_error = std::max(block.max_error, err);
  if (err > threshold) {
    block.pass = false;
    if (block.offending_rows.empty() || block.offending_rows.back() != row) {
      block.offending_rows.push_back(row);
      block.offending_labels.push_back(label);
    }
  }
}

void check_rows(const RowSet& rows, const Vector& x, double h, double threshold, DerivBlock& block) {
  Vector xp = x;
  std::array<double, ScalarFunction::kMaxDeps> grad{};
  for (int i = 0; i < rows.size(); ++i) {
    const ScalarFunction& f = rows.functions[i];
    f(x.data(), grad.data());
    const auto& deps = f.deps();
    for (int k = 0; k < f.nnz(); ++k) {
      const int j = deps[k];
      xp[j] = x[j] + h;
      const double fp = f(xp.data());
      xp[j] = x[j] - h;
      const double fm = f(xp.data());
      xp[j] = x[j];
      record(block, rel_error(grad[k], (fp - fm) / (2.0 * h)), threshold, i, rows.labels[i].str());
    }
  }
}

}  // namespace

double DerivReport::max_error() const {
  return std::max({gradient.max_error, jac_eq.max_error, jac_ineq.max_error, hessian.max_error});
}

DerivReport check_derivatives(const NlpProblem& problem, const Vector& x, double h, double threshold) {
  if (!(h > 0.0)) throw std::invalid_argument("check_derivatives: step must be positive");
  if (x.size() != problem.n_vars()) throw std::invalid_argument("check_derivatives: x has wrong length");
  DerivReport rep;
  rep.threshold = threshold;
  const Objective& obj = problem.objective();
  const int n = problem.n_vars();

  const Vector g = obj.gradient(x);
  const Matrix hess = Matrix(obj.hessian(x));
  Vector xp = x;
  for (int j = 0; j < n; ++j) {
    xp[j] = x[j] + h;
    const double fp = obj.value(xp);
    const Vector gp = obj.gradient(xp);
    xp[j] = x[j] - h;
    const double fm = obj.value(xp);
    const Vector gm = obj.gradient(xp);
    xp[j] = x[j];
    record(rep.gradient, rel_error(g[j], (fp - fm) / (2.0 * h)), threshold, j, "x[" + std::to_string(j) + "]");
    const Vector col = (gp - gm) / (2.0 * h);
    for (int i = 0; i < n; ++i)
      record(rep.hessian, rel_error(hess(i, j), col[i]), threshold, j, "x[" + std::to_string(j) + "]");
  }

  check_rows(problem.eq_rows(), x, h, threshold, rep.jac_eq);
  check_rows(problem.ineq_rows(), x, h, threshold, rep.jac_ineq);
  return rep;
}

}  // namespace crisp

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

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "crisp/qp.hpp"

namespace crisp {

enum class QpStatus { Optimal, MaxIter, NumericalFailure };

std::string_view to_string(QpStatus s);

struct KktResiduals {
  double primal_res = 0.0;
  double dual_res = 0.0;
  double gap = 0.0;

  double max() const { return std::max({primal_res, dual_res, gap}); }
};

/// Sign convention: P z + q - A_eq' y_eq - A_ineq' y_ineq - y_bounds = 0 with
/// y_ineq >= 0, y_bounds >= 0 at active lower bounds and <= 0 at active upper
/// bounds.
struct QpSolution {
  Vector z;
  Vector y_eq;
  Vector y_ineq;
  Vector y_bounds;
  QpStatus status = QpStatus::NumericalFailure;
  KktResiduals kkt;
  int iterations = 0;
  bool polished = false;
};

struct QpSettings {
  double tol = 1e-8;
  int max_iter = 200;
  int ruiz_iters = 10;
  int refine_steps = 3;
  double reg_primal = 1e-10;
  double reg_dual = 1e-10;
  bool polish = true;
};

/// Infinity-norm KKT residuals, unscaled. primal: max constraint and bound
/// violation; dual: stationarity plus dual sign violations; gap: largest
/// complementarity product.
KktResiduals kkt_residuals(const QpData& qp, const QpSolution& sol);

/// Scale used by the relative stopping rule: max(1, |q|, |b_eq|, |b_ineq|).
double kkt_scale(const QpData& qp);

class QpBackend {
 public:
  virtual ~QpBackend() = default;
  virtual std::string_view name() const = 0;
  /// Never throws on numerical trouble; reports it in the status instead.
  virtual QpSolution solve(const QpData& qp, const QpSettings& settings,
                           const QpSolution* warm_start) = 0;
};

/// "reference" (interior point) or "oracle" (active-set enumeration).
/// Throws std::invalid_argument for unknown names.
std::unique_ptr<QpBackend> make_qp_backend(std::string_view name);

/// One-shot interior-point solve with a fresh workspace.
QpSolution solve_qp(const QpData& qp, double tol = 1e-8,
                    const std::optional<QpSolution>& warm_start = std::nullopt);

/// Limit on inequality rows plus finite bounds accepted by the oracle.
inline constexpr int kOracleMaxConstraints = 25;

/// Exact optimum by active-set enumeration. Throws ProblemTooLarge.
QpSolution solve_qp_oracle(const QpData& qp);

}  // namespace crisp

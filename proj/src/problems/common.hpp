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
#include <unsupported/Eigen/AutoDiff>

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "crisp/nlp.hpp"
#include "crisp/problems.hpp"

namespace crisp::detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw SpecError(what);
}

inline void require_size(const std::vector<double>& v, std::size_t n, const std::string& what) {
  require(v.size() == n, what + " must have " + std::to_string(n) + " entries");
}

inline void require_nonnegative(const std::vector<double>& v, const std::string& what) {
  for (double w : v) require(std::isfinite(w) && w >= 0.0, what + " entries must be >= 0");
}

inline void require_positive(double v, const std::string& what) {
  require(std::isfinite(v) && v > 0.0, what + " must be positive");
}

inline void require_horizon(int horizon, double dt) {
  require(horizon >= 2, "horizon must be >= 2");
  require_positive(dt, "dt");
}

/// Row built from a generic callable `f(std::array<T, N>) -> T` evaluated with
/// plain doubles for values and forward-mode dual numbers for gradients.
template <int N, class F>
ScalarFunction smooth(const std::array<int, N>& deps, F f) {
  using Deriv = Eigen::Matrix<double, N, 1>;
  using Dual = Eigen::AutoDiffScalar<Deriv>;
  std::vector<int> d(deps.begin(), deps.end());
  return ScalarFunction(std::move(d), [deps, f](const double* x, double* grad) -> double {
    if (!grad) {
      std::array<double, N> v;
      for (int i = 0; i < N; ++i) v[i] = x[deps[i]];
      return f(v);
    }
    std::array<Dual, N> v;
    for (int i = 0; i < N; ++i) v[i] = Dual(x[deps[i]], N, i);
    const Dual r = f(v);
    for (int i = 0; i < N; ++i) grad[i] = r.derivatives().size() ? r.derivatives()[i] : 0.0;
    return r.value();
  });
}

/// Index arithmetic for a per-step layout.
struct Grid {
  int per_step = 0;
  int operator()(int step, int local) const { return step * per_step + local; }
};

inline RowLabel dyn(std::string name, int step) {
  return {RowCategory::Dynamics, std::move(name), step};
}
inline RowLabel init(std::string name) {
  return {RowCategory::InitialCondition, std::move(name), 0};
}
inline RowLabel comp(std::string name, int step) {
  return {RowCategory::Complementarity, std::move(name), step};
}
inline RowLabel bound(std::string name, int step) {
  return {RowCategory::Bound, std::move(name), step};
}
inline RowLabel other(std::string name, int step) {
  return {RowCategory::Other, std::move(name), step};
}

inline void add_pair(ProblemBuilder& b, ExprId lhs, ExprId rhs, ProductMode mode,
                     std::string name, int step) {
  b.add_complementarity({lhs, rhs, mode}, comp(std::move(name), step));
}

/// x_local(0) = values[i] for each listed column.
inline void add_initial_conditions(ProblemBuilder& b, const Grid& g, const std::vector<int>& cols,
                                   const std::vector<double>& values) {
  const auto& names = b.layout().names;
  for (std::size_t i = 0; i < cols.size(); ++i)
    b.add_equality(ScalarFunction::affine({{g(0, cols[i]), 1.0}}, -values[i]),
                   init(names[cols[i]]));
}

/// x_{k+1} - x_k - dt * xdot_{k+1} = 0 for k = 0 .. N-2.
inline void add_semi_implicit_position(ProblemBuilder& b, const Grid& g, int horizon, double dt,
                                       int pos, int vel) {
  const auto& name = b.layout().names[pos];
  for (int k = 0; k + 1 < horizon; ++k)
    b.add_equality(ScalarFunction::affine({{g(k + 1, pos), 1.0}, {g(k, pos), -1.0}, {g(k + 1, vel), -dt}}),
                   dyn(name + ".integrate", k));
}

VariableLayout make_layout(int horizon, double dt,
                           const std::vector<std::pair<const char*, VarKind>>& vars);

std::shared_ptr<const NlpProblem> finish(ProblemBuilder& b);

}  // namespace crisp::detail

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

#include "common.hpp"

namespace crisp {

namespace {

enum Col { X1, X2, X1D, X2D, Z, W, P, Q, LN, U, FP, FT, N, kCols };

}  // namespace

void WaiterSpec::validate() const {
  using namespace detail;
  require_horizon(horizon, dt);
  require_positive(m1, "physical.m1");
  require_positive(m2, "physical.m2");
  require_positive(mu1, "physical.mu1");
  require_positive(mu2, "physical.mu2");
  require_positive(gravity, "physical.gravity");
  require_positive(l0, "physical.l0");
  require_size(initial_state, 4, "initial_state");
  require_size(target_state, 4, "target_state");
  require_size(Q, 4, "cost.Q");
  require_size(R, 2, "cost.R");
  require_nonnegative(Q, "cost.Q");
  require_nonnegative(R, "cost.R");
}

TrajectoryProblem waiter(const WaiterSpec& spec, ProductMode mode) {
  using namespace detail;
  spec.validate();
  const int n = spec.horizon;
  const double dt = spec.dt;
  const double weight = spec.m1 * spec.gravity;
  ProblemBuilder b(make_layout(n, dt,
                               {{"x1", VarKind::State},
                                {"x2", VarKind::State},
                                {"x1dot", VarKind::State},
                                {"x2dot", VarKind::State},
                                {"z", VarKind::Slack},
                                {"w", VarKind::Slack},
                                {"p", VarKind::Slack},
                                {"q", VarKind::Slack},
                                {"lambdaN", VarKind::Control},
                                {"u", VarKind::Control},
                                {"fp", VarKind::Force},
                                {"ft", VarKind::Force},
                                {"N", VarKind::Force}}));
  const Grid g{kCols};
  add_initial_conditions(b, g, {X1, X2, X1D, X2D}, spec.initial_state);

  for (int k = 0; k + 1 < n; ++k) {
    b.add_equality(ScalarFunction::affine({{g(k + 1, X2D), 1.0},
                                           {g(k, X2D), -1.0},
                                           {g(k, U), -dt / spec.m2},
                                           {g(k, FP), dt / spec.m2}}),
                   dyn("x2dot.accel", k));
    b.add_equality(ScalarFunction::affine({{g(k + 1, X1D), 1.0},
                                           {g(k, X1D), -1.0},
                                           {g(k, FP), -dt / spec.m1},
                                           {g(k, FT), dt / spec.m1}}),
                   dyn("x1dot.accel", k));
  }
  add_semi_implicit_position(b, g, n, dt, X1, X1D);
  add_semi_implicit_position(b, g, n, dt, X2, X2D);

  const double l0 = spec.l0;
  for (int k = 0; k < n; ++k) {
    b.add_equality(ScalarFunction::affine({{g(k, N), 1.0}, {g(k, LN), 1.0}}, -weight),
                   other("force_balance", k));
    b.add_inequality(smooth<3>({g(k, LN), g(k, X2), g(k, X1)},
                               [weight, l0](const auto& v) {
                                 using T = std::decay_t<decltype(v[0])>;
                                 return T(weight * l0 - v[0] * (v[1] - v[2] + l0));
                               }),
                     other("tipping", k));
    b.add_inequality(ScalarFunction::variable(g(k, N)), bound("N_min", k));
    b.add_inequality(ScalarFunction::variable(g(k, LN)), bound("lambdaN_min", k));
    b.add_inequality(ScalarFunction::variable(g(k, X2)), bound("pusher_clear", k));
    b.add_inequality(ScalarFunction::affine({{g(k, X2), -1.0}, {g(k, X1), 1.0}}, l0),
                     bound("pusher_on_plate", k));

    b.add_equality(ScalarFunction::affine({{g(k, X1D), 1.0}, {g(k, Z), -1.0}, {g(k, W), 1.0}}),
                   other("plate_slip", k));
    b.add_equality(ScalarFunction::affine(
                       {{g(k, X2D), 1.0}, {g(k, X1D), -1.0}, {g(k, P), -1.0}, {g(k, Q), 1.0}}),
                   other("pusher_slip", k));

    const ExprId ez = b.add_expression(ScalarFunction::variable(g(k, Z)));
    const ExprId ew = b.add_expression(ScalarFunction::variable(g(k, W)));
    const ExprId ep = b.add_expression(ScalarFunction::variable(g(k, P)));
    const ExprId eq = b.add_expression(ScalarFunction::variable(g(k, Q)));
    const ExprId t_fwd = b.add_expression(ScalarFunction::affine({{g(k, N), spec.mu1}, {g(k, FT), -1.0}}));
    const ExprId t_back = b.add_expression(ScalarFunction::affine({{g(k, N), spec.mu1}, {g(k, FT), 1.0}}));
    const ExprId p_fwd = b.add_expression(ScalarFunction::affine({{g(k, LN), spec.mu2}, {g(k, FP), -1.0}}));
    const ExprId p_back = b.add_expression(ScalarFunction::affine({{g(k, LN), spec.mu2}, {g(k, FP), 1.0}}));
    add_pair(b, ez, ew, mode, "plate_sign", k);
    add_pair(b, ep, eq, mode, "pusher_sign", k);
    add_pair(b, ez, t_fwd, mode, "table_forward", k);
    add_pair(b, ew, t_back, mode, "table_backward", k);
    add_pair(b, ep, p_fwd, mode, "pusher_forward", k);
    add_pair(b, eq, p_back, mode, "pusher_backward", k);
  }

  QuadraticCostBuilder cost(b.n_vars());
  for (int k = 0; k < n; ++k) {
    cost.add_tracking(g(k, LN), spec.R[0]);
    cost.add_tracking(g(k, U), spec.R[1]);
  }
  for (int j = 0; j < 4; ++j) cost.add_tracking(g(n - 1, X1 + j), spec.Q[j], spec.target_state[j]);
  b.set_objective(cost.build());

  TrajectoryProblem p;
  p.kind = "waiter";
  p.nlp = finish(b);
  p.targets = {{TrackKind::Translation, {"x1", "x2"}, {spec.target_state[0], spec.target_state[1]}},
               {TrackKind::Velocity, {"x1dot", "x2dot"}, {spec.target_state[2], spec.target_state[3]}}};
  p.rollout = [spec, g, weight] {
    const int n = spec.horizon;
    Vector x = Vector::Zero(n * kCols);
    for (int j = 0; j < 4; ++j) x[g(0, X1 + j)] = spec.initial_state[j];
    const auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
    for (int k = 0; k < n; ++k) {
      const double v1 = x[g(k, X1D)];
      const double rel = x[g(k, X2D)] - v1;
      x[g(k, N)] = weight;
      x[g(k, Z)] = std::max(0.0, v1);
      x[g(k, W)] = std::max(0.0, -v1);
      x[g(k, P)] = std::max(0.0, rel);
      x[g(k, Q)] = std::max(0.0, -rel);
      x[g(k, FT)] = spec.mu1 * weight * sign(v1);
      if (k + 1 == n) break;
      x[g(k + 1, X1D)] = v1 - spec.dt * x[g(k, FT)] / spec.m1;
      x[g(k + 1, X2D)] = x[g(k, X2D)];
      x[g(k + 1, X1)] = x[g(k, X1)] + spec.dt * x[g(k + 1, X1D)];
      x[g(k + 1, X2)] = x[g(k, X2)] + spec.dt * x[g(k + 1, X2D)];
    }
    return x;
  };
  return p;
}

}  // namespace crisp

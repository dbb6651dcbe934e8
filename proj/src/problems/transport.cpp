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

enum Col { X1, X2, X1D, X2D, P, Q, F, U, kCols };

}  // namespace

void TransportSpec::validate() const {
  using namespace detail;
  require_horizon(horizon, dt);
  require_positive(m1, "physical.m1");
  require_positive(m2, "physical.m2");
  require_positive(friction, "physical.friction");
  require_positive(gravity, "physical.gravity");
  require_positive(l0, "physical.l0");
  require_size(initial_state, 4, "initial_state");
  require_size(target_state, 4, "target_state");
  require_size(Q, 4, "cost.Q");
  require_size(R, 1, "cost.R");
  require_nonnegative(Q, "cost.Q");
  require_nonnegative(R, "cost.R");
  require(std::abs(initial_state[0] - initial_state[1]) <= l0,
          "initial_state places the payload off the cart");
}

TrajectoryProblem transport(const TransportSpec& spec, ProductMode mode) {
  using namespace detail;
  spec.validate();
  const int n = spec.horizon;
  const double dt = spec.dt;
  ProblemBuilder b(make_layout(n, dt,
                               {{"x1", VarKind::State},
                                {"x2", VarKind::State},
                                {"x1dot", VarKind::State},
                                {"x2dot", VarKind::State},
                                {"p", VarKind::Slack},
                                {"q", VarKind::Slack},
                                {"f", VarKind::Force},
                                {"u", VarKind::Control}}));
  const Grid g{kCols};
  add_initial_conditions(b, g, {X1, X2, X1D, X2D}, spec.initial_state);

  for (int k = 0; k + 1 < n; ++k) {
    b.add_equality(ScalarFunction::affine(
                       {{g(k + 1, X1D), 1.0}, {g(k, X1D), -1.0}, {g(k, F), -dt / spec.m1}}),
                   dyn("x1dot.accel", k));
    b.add_equality(ScalarFunction::affine({{g(k + 1, X2D), 1.0},
                                           {g(k, X2D), -1.0},
                                           {g(k, U), -dt / spec.m2},
                                           {g(k, F), dt / spec.m2}}),
                   dyn("x2dot.accel", k));
  }
  add_semi_implicit_position(b, g, n, dt, X1, X1D);
  add_semi_implicit_position(b, g, n, dt, X2, X2D);

  const double fmax = spec.friction * spec.m1 * spec.gravity;
  for (int k = 0; k < n; ++k) {
    b.add_equality(ScalarFunction::affine(
                       {{g(k, X2D), 1.0}, {g(k, X1D), -1.0}, {g(k, P), -1.0}, {g(k, Q), 1.0}}),
                   other("slip", k));
    const ExprId ep = b.add_expression(ScalarFunction::variable(g(k, P)));
    const ExprId eq = b.add_expression(ScalarFunction::variable(g(k, Q)));
    const ExprId fwd = b.add_expression(ScalarFunction::affine({{g(k, F), -1.0}}, fmax));
    const ExprId back = b.add_expression(ScalarFunction::affine({{g(k, F), 1.0}}, fmax));
    add_pair(b, ep, eq, mode, "slip_sign", k);
    add_pair(b, ep, fwd, mode, "friction_forward", k);
    add_pair(b, eq, back, mode, "friction_backward", k);
    b.add_inequality(ScalarFunction::affine({{g(k, X1), -1.0}, {g(k, X2), 1.0}}, spec.l0),
                     bound("payload_right", k));
    b.add_inequality(ScalarFunction::affine({{g(k, X1), 1.0}, {g(k, X2), -1.0}}, spec.l0),
                     bound("payload_left", k));
  }

  QuadraticCostBuilder cost(b.n_vars());
  for (int k = 0; k < n; ++k) cost.add_tracking(g(k, U), spec.R[0]);
  for (int j = 0; j < 4; ++j) cost.add_tracking(g(n - 1, X1 + j), spec.Q[j], spec.target_state[j]);
  b.set_objective(cost.build());

  TrajectoryProblem p;
  p.kind = "transport";
  p.nlp = finish(b);
  p.targets = {{TrackKind::Translation, {"x1", "x2"}, {spec.target_state[0], spec.target_state[1]}},
               {TrackKind::Velocity, {"x1dot", "x2dot"}, {spec.target_state[2], spec.target_state[3]}}};
  p.rollout = [spec, g, fmax] {
    const int n = spec.horizon;
    Vector x = Vector::Zero(n * kCols);
    for (int j = 0; j < 4; ++j) x[g(0, X1 + j)] = spec.initial_state[j];
    for (int k = 0; k < n; ++k) {
      const double rel = x[g(k, X2D)] - x[g(k, X1D)];
      x[g(k, P)] = std::max(0.0, rel);
      x[g(k, Q)] = std::max(0.0, -rel);
      // With u = 0 and matched velocities, static friction is zero.
      x[g(k, F)] = rel > 0.0 ? fmax : (rel < 0.0 ? -fmax : 0.0);
      if (k + 1 == n) break;
      x[g(k + 1, X1D)] = x[g(k, X1D)] + spec.dt * x[g(k, F)] / spec.m1;
      x[g(k + 1, X2D)] = x[g(k, X2D)] - spec.dt * x[g(k, F)] / spec.m2;
      x[g(k + 1, X1)] = x[g(k, X1)] + spec.dt * x[g(k + 1, X1D)];
      x[g(k + 1, X2)] = x[g(k, X2)] + spec.dt * x[g(k + 1, X2D)];
    }
    return x;
  };
  return p;
}

}  // namespace crisp

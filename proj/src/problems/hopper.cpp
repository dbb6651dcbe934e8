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

#include "common.hpp"

namespace crisp {

namespace {

enum Col { PX, PY, QX, QY, TH, R, PXD, PYD, U1, U2, kCols };

}  // namespace

void HopperSpec::validate() const {
  using namespace detail;
  require_horizon(horizon, dt);
  require_positive(mass, "physical.mass");
  require_positive(gravity, "physical.gravity");
  require_positive(l0, "physical.l0");
  require_positive(r0, "physical.r0");
  require(r0 < l0, "physical.r0 must be smaller than physical.l0");
  require(std::isfinite(initial_height) && initial_height >= l0,
          "initial_height must leave the foot at or above the ground");
  require_size(target, 4, "target");
  require_size(Q, 4, "cost.Q");
  require_size(R, 2, "cost.R");
  require_nonnegative(Q, "cost.Q");
  require_nonnegative(R, "cost.R");
}

TrajectoryProblem hopper(const HopperSpec& spec, ProductMode mode) {
  using namespace detail;
  spec.validate();
  const int n = spec.horizon;
  const double dt = spec.dt;
  const double m = spec.mass;
  const double grav = spec.gravity;
  const double l0 = spec.l0;
  ProblemBuilder b(make_layout(n, dt,
                               {{"px", VarKind::State},
                                {"py", VarKind::State},
                                {"qx", VarKind::State},
                                {"qy", VarKind::State},
                                {"theta", VarKind::State},
                                {"r", VarKind::State},
                                {"pxdot", VarKind::State},
                                {"pydot", VarKind::State},
                                {"u1", VarKind::Control},
                                {"u2", VarKind::Control}}));
  const Grid g{kCols};
  add_initial_conditions(b, g, {PX, PY, TH, PXD, PYD}, {0.0, spec.initial_height, 0.0, 0.0, 0.0});

  for (int k = 0; k + 1 < n; ++k) {
    b.add_equality(smooth<4>({g(k + 1, PXD), g(k, PXD), g(k, U2), g(k, TH)},
                             [m, dt](const auto& v) {
                               using std::sin;
                               using T = std::decay_t<decltype(v[0])>;
                               return T(m * (v[0] - v[1]) / dt + v[2] * sin(v[3]));
                             }),
                   dyn("pxdot.thrust", k));
    b.add_equality(smooth<4>({g(k + 1, PYD), g(k, PYD), g(k, U2), g(k, TH)},
                             [m, dt, grav](const auto& v) {
                               using std::cos;
                               using T = std::decay_t<decltype(v[0])>;
                               return T(m * (v[0] - v[1]) / dt - v[2] * cos(v[3]) + m * grav);
                             }),
                   dyn("pydot.thrust", k));
    for (int foot : {QX, QY}) {
      b.add_equality(smooth<3>({g(k, R), g(k + 1, foot), g(k, foot)},
                               [dt](const auto& v) {
                                 using T = std::decay_t<decltype(v[0])>;
                                 return T(v[0] * (v[1] - v[2]) / dt);
                               }),
                     dyn(foot == QX ? "qx.pinned" : "qy.pinned", k));
    }
    b.add_equality(smooth<4>({g(k, QY), g(k + 1, TH), g(k, TH), g(k, U1)},
                             [dt](const auto& v) {
                               using T = std::decay_t<decltype(v[0])>;
                               return T(v[0] * ((v[1] - v[2]) / dt - v[3]));
                             }),
                   dyn("theta.flight_rate", k));
  }
  add_semi_implicit_position(b, g, n, dt, PX, PXD);
  add_semi_implicit_position(b, g, n, dt, PY, PYD);

  for (int k = 0; k < n; ++k) {
    b.add_equality(smooth<4>({g(k, R), g(k, TH), g(k, PY), g(k, QY)},
                             [l0](const auto& v) {
                               using std::cos;
                               using T = std::decay_t<decltype(v[0])>;
                               return T((l0 - v[0]) * cos(v[1]) - v[2] + v[3]);
                             }),
                   dyn("leg.vertical", k));
    b.add_equality(smooth<4>({g(k, R), g(k, TH), g(k, QX), g(k, PX)},
                             [l0](const auto& v) {
                               using std::sin;
                               using T = std::decay_t<decltype(v[0])>;
                               return T((l0 - v[0]) * sin(v[1]) - v[2] + v[3]);
                             }),
                   dyn("leg.horizontal", k));
    b.add_equality(smooth<5>({g(k, R), g(k, PX), g(k, QX), g(k, PY), g(k, QY)},
                             [l0](const auto& v) {
                               using T = std::decay_t<decltype(v[0])>;
                               const T len = l0 - v[0];
                               const T dx = v[1] - v[2];
                               const T dy = v[3] - v[4];
                               return T(v[0] * (len * len - dx * dx - dy * dy));
                             }),
                   dyn("leg.length", k));

    const ExprId er = b.add_expression(ScalarFunction::variable(g(k, R)));
    const ExprId eqy = b.add_expression(ScalarFunction::variable(g(k, QY)));
    const ExprId eu2 = b.add_expression(ScalarFunction::variable(g(k, U2)));
    const ExprId eu1sq = b.add_expression(ScalarFunction::square(ScalarFunction::variable(g(k, U1))));
    add_pair(b, er, eqy, mode, "stance", k);
    add_pair(b, eu2, eqy, mode, "thrust", k);
    add_pair(b, eu1sq, er, mode, "swing", k);
    b.add_inequality(ScalarFunction::affine({{g(k, R), -1.0}}, spec.r0), bound("r_max", k));
  }

  QuadraticCostBuilder cost(b.n_vars());
  for (int k = 0; k < n; ++k) {
    cost.add_tracking(g(k, U1), spec.R[0]);
    cost.add_tracking(g(k, U2), spec.R[1]);
  }
  const std::array<int, 4> tracked{PX, QY, PXD, PYD};
  for (int j = 0; j < 4; ++j) cost.add_tracking(g(n - 1, tracked[j]), spec.Q[j], spec.target[j]);
  b.set_objective(cost.build());

  TrajectoryProblem p;
  p.kind = "hopper";
  p.nlp = finish(b);
  p.targets = {{TrackKind::Translation, {"px", "qy"}, {spec.target[0], spec.target[1]}},
               {TrackKind::Velocity, {"pxdot", "pydot"}, {spec.target[2], spec.target[3]}}};
  p.rollout = [spec, g] {
    const int n = spec.horizon;
    Vector x = Vector::Zero(n * kCols);
    x[g(0, PY)] = spec.initial_height;
    for (int k = 0; k < n; ++k) {
      if (k > 0) {
        x[g(k, PYD)] = x[g(k - 1, PYD)] - spec.dt * spec.gravity;
        x[g(k, PY)] = x[g(k - 1, PY)] + spec.dt * x[g(k, PYD)];
      }
      x[g(k, QY)] = x[g(k, PY)] - spec.l0;
    }
    return x;
  };
  return p;
}

}  // namespace crisp

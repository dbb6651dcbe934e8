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

enum Col { PX, PY, TH, CX, CY, L1Y, L2X, L3Y, L4X, kCols };

}  // namespace

void PushBoxSpec::validate() const {
  using namespace detail;
  require_horizon(horizon, dt);
  require_positive(a, "geometry.a");
  require_positive(b, "geometry.b");
  require_positive(mass, "physical.mass");
  require_positive(friction, "physical.friction");
  require_positive(gravity, "physical.gravity");
  require(integration_constant > 0.0 && integration_constant <= 1.0,
          "physical.integration_constant must lie in (0, 1]");
  require(std::isfinite(char_distance), "physical.char_distance must be finite");
  require_size(initial_pose, 3, "initial_pose");
  require_size(target_pose, 3, "target_pose");
  require_size(Q, 3, "cost.Q");
  require_size(R, 4, "cost.R");
  require_nonnegative(Q, "cost.Q");
  require_nonnegative(R, "cost.R");
}

double PushBoxSpec::r() const { return char_distance > 0.0 ? char_distance : std::hypot(a, b); }

TrajectoryProblem push_box(const PushBoxSpec& spec, ProductMode mode) {
  using namespace detail;
  spec.validate();
  const int n = spec.horizon;
  const double dt = spec.dt;
  ProblemBuilder b(make_layout(n, dt,
                               {{"px", VarKind::State},
                                {"py", VarKind::State},
                                {"theta", VarKind::State},
                                {"cx", VarKind::Control},
                                {"cy", VarKind::Control},
                                {"lambda1y", VarKind::Force},
                                {"lambda2x", VarKind::Force},
                                {"lambda3y", VarKind::Force},
                                {"lambda4x", VarKind::Force}}));
  const Grid g{kCols};
  add_initial_conditions(b, g, {PX, PY, TH}, spec.initial_pose);

  const double k_lin = 1.0 / (spec.friction * spec.mass * spec.gravity);
  const double k_rot = k_lin / (spec.integration_constant * spec.r());
  for (int k = 0; k + 1 < n; ++k) {
    const std::array<int, 9> deps{g(k + 1, PX), g(k, PX), g(k, TH), g(k, CX), g(k, CY),
                                  g(k, L1Y),    g(k, L2X), g(k, L3Y), g(k, L4X)};
    for (int axis = 0; axis < 3; ++axis) {
      std::array<int, 9> d = deps;
      d[0] = g(k + 1, PX + axis);
      d[1] = g(k, PX + axis);
      if (axis == 2) {
        // theta row: theta_k appears both as the integrated state and in the
        // rotation; use a dependency list without the duplicate.
        b.add_equality(smooth<8>({g(k + 1, TH), g(k, TH), g(k, CX), g(k, CY), g(k, L1Y), g(k, L2X),
                                  g(k, L3Y), g(k, L4X)},
                                 [k_rot, dt](const auto& v) {
                                   using T = std::decay_t<decltype(v[0])>;
                                   const T fx = v[5] + v[7];
                                   const T fy = v[4] + v[6];
                                   return T(v[0] - v[1] - dt * k_rot * (-v[3] * fx + v[2] * fy));
                                 }),
                       dyn("theta.euler", k));
        continue;
      }
      b.add_equality(smooth<9>(d,
                               [k_lin, dt, axis](const auto& v) {
                                 using std::cos;
                                 using std::sin;
                                 using T = std::decay_t<decltype(v[0])>;
                                 const T fx = v[6] + v[8];
                                 const T fy = v[5] + v[7];
                                 const T c = cos(v[2]);
                                 const T s = sin(v[2]);
                                 const T rate = axis == 0 ? T(fx * c - fy * s) : T(fx * s + fy * c);
                                 return T(v[0] - v[1] - dt * k_lin * rate);
                               }),
                     dyn(axis == 0 ? "px.euler" : "py.euler", k));
    }
  }

  const double ha = spec.a;
  const double hb = spec.b;
  for (int k = 0; k < n; ++k) {
    // Forces in their sign-corrected (nonnegative) form.
    const std::array<ExprId, 4> force{
        b.add_expression(ScalarFunction::variable(g(k, L1Y))),
        b.add_expression(ScalarFunction::variable(g(k, L2X))),
        b.add_expression(ScalarFunction::variable(g(k, L3Y), -1.0)),
        b.add_expression(ScalarFunction::variable(g(k, L4X), -1.0))};
    const std::array<ExprId, 4> face{
        b.add_expression(ScalarFunction::affine({{g(k, CY), 1.0}}, hb)),
        b.add_expression(ScalarFunction::affine({{g(k, CX), 1.0}}, ha)),
        b.add_expression(ScalarFunction::affine({{g(k, CY), -1.0}}, hb)),
        b.add_expression(ScalarFunction::affine({{g(k, CX), -1.0}}, ha))};
    for (int i = 0; i < 4; ++i) add_pair(b, force[i], face[i], mode, "face" + std::to_string(i + 1), k);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        add_pair(b, force[i], force[j], mode,
                 "exclusive" + std::to_string(i + 1) + std::to_string(j + 1), k);
  }

  QuadraticCostBuilder cost(b.n_vars());
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < 4; ++j) cost.add_tracking(g(k, L1Y + j), spec.R[j]);
  for (int j = 0; j < 3; ++j) cost.add_tracking(g(n - 1, PX + j), spec.Q[j], spec.target_pose[j]);
  b.set_objective(cost.build());

  TrajectoryProblem p;
  p.kind = "push_box";
  p.nlp = finish(b);
  p.targets = {{TrackKind::Translation, {"px", "py"}, {spec.target_pose[0], spec.target_pose[1]}},
               {TrackKind::Angle, {"theta"}, {spec.target_pose[2]}}};
  p.rollout = [spec, g] {
    Vector x = Vector::Zero(spec.horizon * kCols);
    for (int k = 0; k < spec.horizon; ++k)
      for (int j = 0; j < 3; ++j) x[g(k, PX + j)] = spec.initial_pose[j];
    return x;
  };
  return p;
}

}  // namespace crisp

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

constexpr int PX = 0, PY = 1, TH = 2, CX = 3, CY = 4;
constexpr int LAM = 5;    // lambda1 .. lambda8
constexpr int V = 13;     // v1 .. v8
constexpr int W = 21;     // w1 .. w8
constexpr int kCols = 29;
constexpr int kSlacks = 7;

// Sign that makes each face force nonnegative.
constexpr std::array<double, 8> kForceSign{-1, -1, 1, -1, 1, 1, 1, 1};
// Faces 2, 4, 6, 8 push along body x; faces 1, 3, 5, 7 along body y.

/// Slack j encodes |coord - offset * l| with coord = cx (true) or cy.
struct SlackDef {
  bool on_x;
  double offset;  // in units of l
};

std::array<SlackDef, kSlacks> slack_defs(double dc) {
  return {{{true, 2.0}, {false, 4.0 - dc}, {false, 3.0 - dc}, {true, 0.5},
           {false, -dc}, {true, -0.5}, {true, -2.0}}};
}

/// Slacks (0-based) summed by the gap of faces 2..8, and the gap constant.
struct FaceGap {
  std::array<int, 3> slacks;
  double length;  // in units of l
};
constexpr std::array<FaceGap, 7> kFaceGaps{{{{0, 1, 2}, 1.0},
                                            {{0, 2, 3}, 1.5},
                                            {{2, 3, 4}, 3.0},
                                            {{3, 4, 5}, 1.0},
                                            {{2, 4, 5}, 3.0},
                                            {{2, 5, 6}, 1.5},
                                            {{1, 2, 6}, 1.0}}};

}  // namespace

void PushTSpec::validate() const {
  using namespace detail;
  require_horizon(horizon, dt);
  require_positive(l, "geometry.l");
  require(dc > 0.0 && dc < 3.0, "geometry.dc must lie in (0, 3)");
  require_positive(mass, "physical.mass");
  require_positive(friction, "physical.friction");
  require_positive(gravity, "physical.gravity");
  require(integration_constant > 0.0 && integration_constant <= 1.0,
          "physical.integration_constant must lie in (0, 1]");
  require(std::isfinite(char_distance), "physical.char_distance must be finite");
  require_size(initial_pose, 3, "initial_pose");
  require_size(target_pose, 3, "target_pose");
  require_size(Q, 3, "cost.Q");
  require_size(R, 1, "cost.R");
  require_nonnegative(Q, "cost.Q");
  require_nonnegative(R, "cost.R");
  require(std::isfinite(slack_weight) && slack_weight >= 0.0, "cost.slack_weight must be >= 0");
}

double PushTSpec::r() const {
  if (char_distance > 0.0) return char_distance;
  const double top = std::hypot(2.0, 4.0 - dc);
  const double bottom = std::hypot(0.5, dc);
  return l * std::max(top, bottom);
}

TrajectoryProblem push_t(const PushTSpec& spec, ProductMode mode) {
  using namespace detail;
  spec.validate();
  const int n = spec.horizon;
  const double dt = spec.dt;
  const double l = spec.l;
  const double dc = spec.dc;

  VariableLayout layout;
  layout.horizon = n;
  layout.dt = dt;
  for (const char* s : {"px", "py", "theta"}) layout.add(s, VarKind::State);
  layout.add("cx", VarKind::Control);
  layout.add("cy", VarKind::Control);
  for (int i = 1; i <= 8; ++i) layout.add("lambda" + std::to_string(i), VarKind::Force);
  for (int i = 1; i <= 8; ++i) layout.add("v" + std::to_string(i), VarKind::Slack);
  for (int i = 1; i <= 8; ++i) layout.add("w" + std::to_string(i), VarKind::Slack);
  ProblemBuilder b(std::move(layout));
  const Grid g{kCols};
  add_initial_conditions(b, g, {PX, PY, TH}, spec.initial_pose);

  const double k_lin = 1.0 / (spec.friction * spec.mass * spec.gravity);
  const double k_rot = k_lin / (spec.integration_constant * spec.r());
  for (int k = 0; k + 1 < n; ++k) {
    for (int axis = 0; axis < 2; ++axis) {
      std::array<int, 11> d{};
      d[0] = g(k + 1, PX + axis);
      d[1] = g(k, PX + axis);
      d[2] = g(k, TH);
      for (int i = 0; i < 8; ++i) d[3 + i] = g(k, LAM + i);
      b.add_equality(smooth<11>(d,
                                [k_lin, dt, axis](const auto& v) {
                                  using std::cos;
                                  using std::sin;
                                  using T = std::decay_t<decltype(v[0])>;
                                  const T fx = v[4] + v[6] + v[8] + v[10];
                                  const T fy = v[3] + v[5] + v[7] + v[9];
                                  const T c = cos(v[2]);
                                  const T s = sin(v[2]);
                                  const T rate = axis == 0 ? T(fx * c - fy * s) : T(fx * s + fy * c);
                                  return T(v[0] - v[1] - dt * k_lin * rate);
                                }),
                     dyn(axis == 0 ? "px.euler" : "py.euler", k));
    }
    std::array<int, 12> d{};
    d[0] = g(k + 1, TH);
    d[1] = g(k, TH);
    d[2] = g(k, CX);
    d[3] = g(k, CY);
    for (int i = 0; i < 8; ++i) d[4 + i] = g(k, LAM + i);
    b.add_equality(smooth<12>(d,
                              [k_rot, dt](const auto& v) {
                                using T = std::decay_t<decltype(v[0])>;
                                const T fx = v[5] + v[7] + v[9] + v[11];
                                const T fy = v[4] + v[6] + v[8] + v[10];
                                return T(v[0] - v[1] - dt * k_rot * (-v[3] * fx + v[2] * fy));
                              }),
                   dyn("theta.euler", k));
  }

  const auto defs = slack_defs(dc);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < kSlacks; ++j) {
      const int coord = defs[j].on_x ? CX : CY;
      b.add_equality(ScalarFunction::affine({{g(k, V + j), 1.0}, {g(k, W + j), -1.0}, {g(k, coord), -1.0}},
                                            defs[j].offset * l),
                     other("abs" + std::to_string(j + 1), k));
      const ExprId ev = b.add_expression(ScalarFunction::variable(g(k, V + j)));
      const ExprId ew = b.add_expression(ScalarFunction::variable(g(k, W + j)));
      add_pair(b, ev, ew, mode, "abs" + std::to_string(j + 1), k);
    }

    std::array<ExprId, 8> force{};
    for (int i = 0; i < 8; ++i)
      force[i] = b.add_expression(ScalarFunction::variable(g(k, LAM + i), kForceSign[i]));
    std::array<ExprId, 8> gap{};
    gap[0] = b.add_expression(ScalarFunction::affine({{g(k, CY), -1.0}}, (4.0 - dc) * l));
    for (int i = 1; i < 8; ++i) {
      std::vector<std::pair<int, double>> terms;
      for (int s : kFaceGaps[i - 1].slacks) {
        terms.push_back({g(k, V + s), 1.0});
        terms.push_back({g(k, W + s), 1.0});
      }
      gap[i] = b.add_expression(ScalarFunction::affine(std::move(terms), -kFaceGaps[i - 1].length * l));
    }
    for (int i = 0; i < 8; ++i) add_pair(b, force[i], gap[i], mode, "face" + std::to_string(i + 1), k);
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j)
        add_pair(b, force[i], force[j], mode,
                 "exclusive" + std::to_string(i + 1) + std::to_string(j + 1), k);

    b.add_inequality(ScalarFunction::affine({{g(k, CX), 1.0}}, 2.0 * l), bound("cx_min", k));
    b.add_inequality(ScalarFunction::affine({{g(k, CX), -1.0}}, 2.0 * l), bound("cx_max", k));
    b.add_inequality(ScalarFunction::affine({{g(k, CY), 1.0}}, dc * l), bound("cy_min", k));
    b.add_inequality(ScalarFunction::affine({{g(k, CY), -1.0}}, (4.0 - dc) * l), bound("cy_max", k));
  }

  QuadraticCostBuilder cost(b.n_vars());
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < 8; ++i) cost.add_tracking(g(k, LAM + i), spec.R[0]);
    cost.add_tracking(g(k, V + 7), spec.slack_weight);
    cost.add_tracking(g(k, W + 7), spec.slack_weight);
  }
  for (int j = 0; j < 3; ++j) cost.add_tracking(g(n - 1, PX + j), spec.Q[j], spec.target_pose[j]);
  b.set_objective(cost.build());

  TrajectoryProblem p;
  p.kind = "push_t";
  p.nlp = finish(b);
  p.targets = {{TrackKind::Translation, {"px", "py"}, {spec.target_pose[0], spec.target_pose[1]}},
               {TrackKind::Angle, {"theta"}, {spec.target_pose[2]}}};
  p.rollout = [spec, g, defs] {
    Vector x = Vector::Zero(spec.horizon * kCols);
    for (int k = 0; k < spec.horizon; ++k) {
      for (int j = 0; j < 3; ++j) x[g(k, PX + j)] = spec.initial_pose[j];
      for (int j = 0; j < kSlacks; ++j) {
        const double e = -defs[j].offset * spec.l;  // contact point at the centre of mass
        x[g(k, V + j)] = std::max(0.0, e);
        x[g(k, W + j)] = std::max(0.0, -e);
      }
    }
    return x;
  };
  return p;
}

}  // namespace crisp

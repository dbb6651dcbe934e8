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

enum Col { X, TH, XD, THD, U, L1, L2, kCols };

/// Cart and pole accelerations solved from the two coupled equations of
/// motion. Returns {xddot, thetaddot}.
struct Accel {
  double mc, mp, len, g;

  template <class T>
  std::array<T, 2> operator()(const T& th, const T& u, const T& l1, const T& l2) const {
    using std::cos;
    using std::sin;
    const T s = sin(th);
    const T c = cos(th);
    const T force = u - l1 + l2;
    const T torque = (l2 - l1) * c + mp * g * s;
    const T den = mc + mp * s * s;
    const T xdd = (force - torque * c) / den;
    const T thdd = ((mc + mp) * torque - mp * c * force) / (mp * len * den);
    return {xdd, thdd};
  }
};

}  // namespace

void CartpoleSpec::validate() const {
  using namespace detail;
  require_horizon(horizon, dt);
  require_positive(mass_cart, "physical.mass_cart");
  require_positive(mass_pole, "physical.mass_pole");
  require_positive(length, "physical.length");
  require_positive(gravity, "physical.gravity");
  require_positive(k1, "walls.k1");
  require_positive(k2, "walls.k2");
  require_positive(d1, "walls.d1");
  require_positive(d2, "walls.d2");
  require_size(initial_state, 4, "initial_state");
  require_size(target_state, 4, "target_state");
  require_size(Q, 4, "cost.Q");
  require_size(R, 3, "cost.R");
  require_nonnegative(Q, "cost.Q");
  require_nonnegative(R, "cost.R");
}

TrajectoryProblem cartpole_softwalls(const CartpoleSpec& spec, ProductMode mode) {
  using namespace detail;
  spec.validate();
  const int n = spec.horizon;
  const double dt = spec.dt;
  ProblemBuilder b(make_layout(n, dt,
                               {{"x", VarKind::State},
                                {"theta", VarKind::State},
                                {"xdot", VarKind::State},
                                {"thetadot", VarKind::State},
                                {"u", VarKind::Control},
                                {"lambda1", VarKind::Force},
                                {"lambda2", VarKind::Force}}));
  const Grid g{kCols};
  const Accel acc{spec.mass_cart, spec.mass_pole, spec.length, spec.gravity};

  add_initial_conditions(b, g, {X, TH, XD, THD}, spec.initial_state);

  add_semi_implicit_position(b, g, n, dt, X, XD);
  add_semi_implicit_position(b, g, n, dt, TH, THD);
  for (int k = 0; k + 1 < n; ++k) {
    for (int which : {0, 1}) {
      const int vel = which == 0 ? XD : THD;
      b.add_equality(smooth<6>({g(k + 1, vel), g(k, vel), g(k, TH), g(k, U), g(k, L1), g(k, L2)},
                               [acc, dt, which](const auto& v) {
                                 using T = std::decay_t<decltype(v[0])>;
                                 const auto a = acc(v[2], v[3], v[4], v[5]);
                                 return T(v[0] - v[1] - dt * a[which]);
                               }),
                     dyn(which == 0 ? "xdot.accel" : "thetadot.accel", k));
    }
  }

  const double len = spec.length;
  for (int k = 0; k < n; ++k) {
    for (int wall : {0, 1}) {
      const int lam = wall == 0 ? L1 : L2;
      const double stiff = wall == 0 ? spec.k1 : spec.k2;
      const double d = wall == 0 ? spec.d1 : spec.d2;
      const double side = wall == 0 ? -1.0 : 1.0;
      const ExprId force = b.add_expression(ScalarFunction::variable(g(k, lam)));
      const ExprId gap = b.add_expression(
          smooth<3>({g(k, lam), g(k, X), g(k, TH)}, [stiff, d, side, len](const auto& v) {
            using std::sin;
            using T = std::decay_t<decltype(v[0])>;
            return T(v[0] / stiff + d + side * (v[1] + len * sin(v[2])));
          }));
      add_pair(b, force, gap, mode, wall == 0 ? "wall_right" : "wall_left", k);
    }
  }

  QuadraticCostBuilder cost(b.n_vars());
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < 3; ++j) cost.add_tracking(g(k, U + j), spec.R[j]);
  for (int j = 0; j < 4; ++j) cost.add_tracking(g(n - 1, X + j), spec.Q[j], spec.target_state[j]);
  b.set_objective(cost.build());

  TrajectoryProblem p;
  p.kind = "cartpole";
  p.nlp = finish(b);
  p.targets = {{TrackKind::Translation, {"x"}, {spec.target_state[0]}},
               {TrackKind::Angle, {"theta"}, {spec.target_state[1]}},
               {TrackKind::Velocity, {"xdot"}, {spec.target_state[2]}},
               {TrackKind::AngularRate, {"thetadot"}, {spec.target_state[3]}}};
  p.rollout = [spec, acc, g] {
    const int n = spec.horizon;
    Vector x = Vector::Zero(n * kCols);
    for (int j = 0; j < 4; ++j) x[g(0, X + j)] = spec.initial_state[j];
    for (int k = 0; k < n; ++k) {
      const double tip = x[g(k, X)] + spec.length * std::sin(x[g(k, TH)]);
      x[g(k, L1)] = std::max(0.0, -spec.k1 * (spec.d1 - tip));
      x[g(k, L2)] = std::max(0.0, -spec.k2 * (spec.d2 + tip));
      if (k + 1 == n) break;
      const auto a = acc(x[g(k, TH)], 0.0, x[g(k, L1)], x[g(k, L2)]);
      x[g(k + 1, XD)] = x[g(k, XD)] + spec.dt * a[0];
      x[g(k + 1, THD)] = x[g(k, THD)] + spec.dt * a[1];
      x[g(k + 1, X)] = x[g(k, X)] + spec.dt * x[g(k + 1, XD)];
      x[g(k + 1, TH)] = x[g(k, TH)] + spec.dt * x[g(k + 1, THD)];
    }
    return x;
  };
  return p;
}

}  // namespace crisp

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

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "crisp/nlp.hpp"

namespace crisp {

/// Maps an angle to [-pi, pi).
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0.0) a += two_pi;
  return a - std::numbers::pi;
}

enum class TrackKind { Translation, Velocity, Angle, AngularRate };

/// Terminal components compared against a reference by the success check.
struct TrackedGroup {
  TrackKind kind = TrackKind::Translation;
  std::vector<std::string> names;
  std::vector<double> target;
};

/// A built problem together with what the harness needs to run it.
struct TrajectoryProblem {
  std::string kind;
  std::shared_ptr<const NlpProblem> nlp;
  std::vector<TrackedGroup> targets;
  /// Zero-control rollout from the initial state; satisfies every dynamics
  /// and initial-condition row.
  std::function<Vector()> rollout;
};

enum class GuessMode { AllZero, PassiveRollout, NoisyRollout };

struct GuessOptions {
  GuessMode mode = GuessMode::AllZero;
  std::uint64_t seed = 0;
  double sigma = 0.05;
};

Vector initial_guess(const TrajectoryProblem& problem, const GuessOptions& options);

/// Per-step values decoded from the flat decision vector.
struct Trajectory {
  std::vector<std::string> names;
  Vector times;
  Matrix values;  // horizon x per_step

  int steps() const { return static_cast<int>(values.rows()); }
  double at(int step, const std::string& name) const;
  Vector terminal() const { return values.row(values.rows() - 1).transpose(); }
};

Trajectory decode_trajectory(const NlpProblem& problem, const Vector& x);
/// Throws std::invalid_argument if names or shape disagree with the layout.
Vector encode_trajectory(const NlpProblem& problem, const Trajectory& trajectory);

// Problem specifications. Every numeric field is a repository default that
// can be overridden from a parameter file; visit() lists the fields under
// their parameter-file keys.

struct CartpoleSpec {
  int horizon = 200;
  double dt = 0.02;
  double mass_cart = 1.0;
  double mass_pole = 0.1;
  double length = 0.5;
  double gravity = 9.81;
  double k1 = 100.0;
  double k2 = 100.0;
  double d1 = 0.35;
  double d2 = 0.35;
  std::vector<double> initial_state{0.0, 0.5, 0.0, 0.0};  // x, theta, xdot, thetadot
  std::vector<double> target_state{0.0, 0.0, 0.0, 0.0};
  std::vector<double> Q{100.0, 100.0, 10.0, 10.0};
  std::vector<double> R{0.1, 0.001, 0.001};  // u, lambda1, lambda2

  template <class V>
  void visit(V&& v) {
    v("horizon", horizon);
    v("dt", dt);
    v("physical.mass_cart", mass_cart);
    v("physical.mass_pole", mass_pole);
    v("physical.length", length);
    v("physical.gravity", gravity);
    v("walls.k1", k1);
    v("walls.k2", k2);
    v("walls.d1", d1);
    v("walls.d2", d2);
    v("initial_state", initial_state);
    v("target_state", target_state);
    v("cost.Q", Q);
    v("cost.R", R);
  }
  void validate() const;
};

struct PushBoxSpec {
  int horizon = 200;
  double dt = 0.02;
  double a = 0.5;  // half extent along body x
  double b = 0.5;  // half extent along body y
  double mass = 1.0;
  double friction = 0.5;
  double gravity = 9.81;
  double integration_constant = 0.6;
  double char_distance = 0.0;  // <= 0 selects sqrt(a^2 + b^2)
  std::vector<double> initial_pose{0.0, 0.0, 0.0};
  std::vector<double> target_pose{3.0, 0.0, 0.0};
  std::vector<double> Q{1e3, 1e3, 1e3};
  std::vector<double> R{0.01, 0.01, 0.01, 0.01};

  template <class V>
  void visit(V&& v) {
    v("horizon", horizon);
    v("dt", dt);
    v("geometry.a", a);
    v("geometry.b", b);
    v("physical.mass", mass);
    v("physical.friction", friction);
    v("physical.gravity", gravity);
    v("physical.integration_constant", integration_constant);
    v("physical.char_distance", char_distance);
    v("initial_pose", initial_pose);
    v("target_pose", target_pose);
    v("cost.Q", Q);
    v("cost.R", R);
  }
  void validate() const;
  double r() const;
};

struct TransportSpec {
  int horizon = 200;
  double dt = 0.02;
  double m1 = 1.0;  // payload
  double m2 = 2.0;  // cart
  double friction = 0.3;
  double gravity = 9.81;
  double l0 = 1.0;
  std::vector<double> initial_state{3.0, 3.0, 0.0, 0.0};  // x1, x2, x1dot, x2dot
  std::vector<double> target_state{0.0, 0.0, 0.0, 0.0};
  std::vector<double> Q{1e4, 1e4, 1e4, 1e4};
  std::vector<double> R{1e-3};  // u

  template <class V>
  void visit(V&& v) {
    v("horizon", horizon);
    v("dt", dt);
    v("physical.m1", m1);
    v("physical.m2", m2);
    v("physical.friction", friction);
    v("physical.gravity", gravity);
    v("physical.l0", l0);
    v("initial_state", initial_state);
    v("target_state", target_state);
    v("cost.Q", Q);
    v("cost.R", R);
  }
  void validate() const;
};

struct PushTSpec {
  int horizon = 50;
  double dt = 0.05;
  double l = 0.1;
  double dc = 18.5 / 7.0;  // centre of mass offset in units of l
  double mass = 1.0;
  double friction = 0.5;
  double gravity = 9.81;
  double integration_constant = 0.6;
  double char_distance = 0.0;  // <= 0 selects the farthest boundary point
  std::vector<double> initial_pose{0.0, 0.0, 0.0};
  std::vector<double> target_pose{0.3, 0.0, 0.0};
  std::vector<double> Q{1e3, 1e3, 1e3};
  std::vector<double> R{0.01};     // every contact force
  double slack_weight = 1e-4;      // keeps the unconstrained slack pair bounded

  template <class V>
  void visit(V&& v) {
    v("horizon", horizon);
    v("dt", dt);
    v("geometry.l", l);
    v("geometry.dc", dc);
    v("physical.mass", mass);
    v("physical.friction", friction);
    v("physical.gravity", gravity);
    v("physical.integration_constant", integration_constant);
    v("physical.char_distance", char_distance);
    v("initial_pose", initial_pose);
    v("target_pose", target_pose);
    v("cost.Q", Q);
    v("cost.R", R);
    v("cost.slack_weight", slack_weight);
  }
  void validate() const;
  double r() const;
};

struct HopperSpec {
  int horizon = 200;
  double dt = 0.02;
  double mass = 1.0;
  double gravity = 9.81;
  double l0 = 0.5;
  double r0 = 0.25;
  double initial_height = 1.5;
  std::vector<double> target{2.0, 0.0, 0.0, 0.0};  // p_x, q_y, p_x dot, p_y dot
  std::vector<double> Q{100.0, 100.0, 10.0, 10.0};
  std::vector<double> R{0.1, 0.001};  // u1, u2

  template <class V>
  void visit(V&& v) {
    v("horizon", horizon);
    v("dt", dt);
    v("physical.mass", mass);
    v("physical.gravity", gravity);
    v("physical.l0", l0);
    v("physical.r0", r0);
    v("initial_height", initial_height);
    v("target", target);
    v("cost.Q", Q);
    v("cost.R", R);
  }
  void validate() const;
};

struct WaiterSpec {
  int horizon = 200;
  double dt = 0.02;
  double m1 = 1.0;  // plate
  double m2 = 1.0;  // pusher
  double mu1 = 0.1;  // plate / table
  double mu2 = 0.5;  // pusher / plate
  double gravity = 9.81;
  double l0 = 7.0;  // half plate length
  std::vector<double> initial_state{-6.0, 0.0, 0.0, 0.0};  // x1, x2, x1dot, x2dot
  std::vector<double> target_state{0.0, 0.0, 2.0, 2.0};
  std::vector<double> Q{100.0, 100.0, 10.0, 10.0};
  std::vector<double> R{0.01, 0.01};  // lambda_N, u

  template <class V>
  void visit(V&& v) {
    v("horizon", horizon);
    v("dt", dt);
    v("physical.m1", m1);
    v("physical.m2", m2);
    v("physical.mu1", mu1);
    v("physical.mu2", mu2);
    v("physical.gravity", gravity);
    v("physical.l0", l0);
    v("initial_state", initial_state);
    v("target_state", target_state);
    v("cost.Q", Q);
    v("cost.R", R);
  }
  void validate() const;
};

struct ToySpec {
  std::vector<double> x0{1.0, 1.0};

  template <class V>
  void visit(V&& v) {
    v("x0", x0);
  }
  void validate() const;
};

/// min x1^2 + x2^2 s.t. 0 <= x1 _|_ x2 >= 0.
TrajectoryProblem toy_mpcc(const ToySpec& spec = {}, ProductMode mode = ProductMode::Equality);
/// min x1 s.t. x1^3 - x2 >= 0, x1^3 + x2 >= 0.
TrajectoryProblem cq_fail_toy(const ToySpec& spec = ToySpec{{1.0, 0.5}});
/// Stationary point of the fixed-penalty merit function of cq_fail_toy.
inline double cq_fail_stationary_x1(double mu) { return -1.0 / std::sqrt(6.0 * mu); }

TrajectoryProblem cartpole_softwalls(const CartpoleSpec& spec, ProductMode mode = ProductMode::Equality);
TrajectoryProblem push_box(const PushBoxSpec& spec, ProductMode mode = ProductMode::Equality);
TrajectoryProblem transport(const TransportSpec& spec, ProductMode mode = ProductMode::Equality);
TrajectoryProblem push_t(const PushTSpec& spec, ProductMode mode = ProductMode::Equality);
TrajectoryProblem hopper(const HopperSpec& spec, ProductMode mode = ProductMode::Equality);
TrajectoryProblem waiter(const WaiterSpec& spec, ProductMode mode = ProductMode::Equality);

}  // namespace crisp

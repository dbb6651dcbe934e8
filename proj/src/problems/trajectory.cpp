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

#include <random>
#include <stdexcept>

#include "common.hpp"

namespace crisp {

namespace detail {

VariableLayout make_layout(int horizon, double dt,
                           const std::vector<std::pair<const char*, VarKind>>& vars) {
  VariableLayout layout;
  layout.horizon = horizon;
  layout.dt = dt;
  for (const auto& [name, kind] : vars) layout.add(name, kind);
  return layout;
}

std::shared_ptr<const NlpProblem> finish(ProblemBuilder& b) {
  return std::make_shared<const NlpProblem>(b.build());
}

}  // namespace detail

Vector initial_guess(const TrajectoryProblem& problem, const GuessOptions& options) {
  if (!problem.nlp) throw std::invalid_argument("initial_guess: problem not built");
  switch (options.mode) {
    case GuessMode::AllZero:
      return Vector::Zero(problem.nlp->n_vars());
    case GuessMode::PassiveRollout:
      return problem.rollout();
    case GuessMode::NoisyRollout: {
      if (!(options.sigma >= 0.0)) throw std::invalid_argument("initial_guess: sigma must be >= 0");
      Vector x = problem.rollout();
      std::mt19937_64 rng(options.seed);
      std::normal_distribution<double> noise(0.0, options.sigma);
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += noise(rng);
      return x;
    }
  }
  throw std::invalid_argument("initial_guess: unknown mode");
}

double Trajectory::at(int step, const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return values(step, static_cast<Eigen::Index>(j));
  throw std::out_of_range("trajectory has no variable '" + name + "'");
}

Trajectory decode_trajectory(const NlpProblem& problem, const Vector& x) {
  const auto& layout = problem.layout();
  if (x.size() != layout.n_vars())
    throw std::invalid_argument("decode_trajectory: vector length does not match the layout");
  Trajectory t;
  t.names = layout.names;
  t.times.resize(layout.horizon);
  t.values.resize(layout.horizon, layout.per_step());
  for (int k = 0; k < layout.horizon; ++k) {
    t.times[k] = k * layout.dt;
    t.values.row(k) = x.segment(k * layout.per_step(), layout.per_step()).transpose();
  }
  return t;
}

Vector encode_trajectory(const NlpProblem& problem, const Trajectory& trajectory) {
  const auto& layout = problem.layout();
  if (trajectory.names != layout.names)
    throw std::invalid_argument("encode_trajectory: variable names do not match the layout");
  if (trajectory.values.rows() != layout.horizon || trajectory.values.cols() != layout.per_step())
    throw std::invalid_argument("encode_trajectory: trajectory shape does not match the layout");
  Vector x(layout.n_vars());
  for (int k = 0; k < layout.horizon; ++k)
    x.segment(k * layout.per_step(), layout.per_step()) = trajectory.values.row(k).transpose();
  return x;
}

void ToySpec::validate() const {
  detail::require_size(x0, 2, "x0");
  for (double v : x0) detail::require(std::isfinite(v), "x0 entries must be finite");
}

TrajectoryProblem toy_mpcc(const ToySpec& spec, ProductMode mode) {
  spec.validate();
  ProblemBuilder b(detail::make_layout(1, 1.0, {{"x1", VarKind::State}, {"x2", VarKind::State}}));
  QuadraticCostBuilder cost(2);
  cost.add_tracking(0, 2.0);
  cost.add_tracking(1, 2.0);
  b.set_objective(cost.build());
  const ExprId a = b.add_expression(ScalarFunction::variable(0));
  const ExprId c = b.add_expression(ScalarFunction::variable(1));
  detail::add_pair(b, a, c, mode, "x1_x2", 0);

  TrajectoryProblem p;
  p.kind = "toy_mpcc";
  p.nlp = detail::finish(b);
  p.targets = {{TrackKind::Translation, {"x1", "x2"}, {0.0, 0.0}}};
  const Vector x0 = Eigen::Map<const Vector>(spec.x0.data(), 2);
  p.rollout = [x0] { return x0; };
  return p;
}

TrajectoryProblem cq_fail_toy(const ToySpec& spec) {
  spec.validate();
  ProblemBuilder b(detail::make_layout(1, 1.0, {{"x1", VarKind::State}, {"x2", VarKind::State}}));
  Vector g = Vector::Zero(2);
  g[0] = 1.0;
  b.set_objective(std::make_shared<QuadraticObjective>(SparseMatrix(2, 2), g));
  for (double sign : {-1.0, 1.0}) {
    b.add_inequality(ScalarFunction({0, 1},
                                    [sign](const double* x, double* grad) {
                                      if (grad) {
                                        grad[0] = 3.0 * x[0] * x[0];
                                        grad[1] = sign;
                                      }
                                      return x[0] * x[0] * x[0] + sign * x[1];
                                    }),
                     detail::other(sign < 0 ? "cubic_minus" : "cubic_plus", 0));
  }

  TrajectoryProblem p;
  p.kind = "cq_fail";
  p.nlp = detail::finish(b);
  p.targets = {{TrackKind::Translation, {"x1", "x2"}, {0.0, 0.0}}};
  const Vector x0 = Eigen::Map<const Vector>(spec.x0.data(), 2);
  p.rollout = [x0] { return x0; };
  return p;
}

}  // namespace crisp

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

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "crisp/harness.hpp"

namespace crisp {

namespace {

double norm_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

ParamMap vec_param(const std::string& key, const std::vector<double>& v) { return {{key, v}}; }

}  // namespace

void SuccessCriteria::validate() const {
  for (double t : {max_violation, translation, velocity, angle, angular_rate})
    if (!(t > 0.0)) throw std::invalid_argument("success thresholds must be positive");
}

SuccessMetrics evaluate_success(const Trajectory& trajectory, const std::vector<TrackedGroup>& targets,
                                const SuccessCriteria& criteria, double violation) {
  criteria.validate();
  if (trajectory.steps() == 0) throw std::invalid_argument("evaluate_success: empty trajectory");
  SuccessMetrics m;
  m.violation = violation;
  const int last = trajectory.steps() - 1;
  std::vector<double> all;
  std::map<TrackKind, std::vector<double>> by_kind;
  for (const auto& group : targets) {
    if (group.names.size() != group.target.size())
      throw std::invalid_argument("evaluate_success: target size does not match its names");
    for (std::size_t i = 0; i < group.names.size(); ++i) {
      double e = trajectory.at(last, group.names[i]) - group.target[i];
      if (group.kind == TrackKind::Angle) e = wrap_angle(e);
      by_kind[group.kind].push_back(e);
      all.push_back(e);
    }
  }
  auto metric = [&](TrackKind k) -> std::optional<double> {
    auto it = by_kind.find(k);
    if (it == by_kind.end()) return std::nullopt;
    return norm_of(it->second);
  };
  m.translation_error = metric(TrackKind::Translation);
  m.velocity_error = metric(TrackKind::Velocity);
  m.angle_error = metric(TrackKind::Angle);
  m.angular_rate_error = metric(TrackKind::AngularRate);
  m.tracking_error = norm_of(all);

  auto within = [](const std::optional<double>& v, double limit) { return !v || *v < limit; };
  m.success = std::isfinite(violation) && violation < criteria.max_violation &&
              within(m.translation_error, criteria.translation) &&
              within(m.velocity_error, criteria.velocity) && within(m.angle_error, criteria.angle) &&
              within(m.angular_rate_error, criteria.angular_rate);
  return m;
}

double max_complementarity_product(const NlpProblem& problem, const Vector& x) {
  const ConstraintValues c = problem.constraints(x, Exec::Serial);
  double worst = 0.0;
  for (const auto& rec : problem.complementarity())
    worst = std::max(worst, std::abs(c.ineq[rec.lhs_row] * c.ineq[rec.rhs_row]));
  return worst;
}

RunResult run_one(const RunSpec& spec, const SuccessCriteria& criteria, const SolveOptions& options) {
  const ProblemEntry& entry = find_problem(spec.problem);
  const TrajectoryProblem problem = entry.build(spec.params, spec.config.complementarity_mode);
  const Vector x0 = initial_guess(problem, spec.guess);

  RunResult result;
  result.spec = spec;
  try {
    result.report = solve(*problem.nlp, x0, spec.config, options);
  } catch (const std::exception& e) {
    result.error = e.what();
    result.report.x_star = x0;
    result.report.final_violation = kInf;
    result.metrics.violation = kInf;
    return result;
  }
  const Trajectory traj = decode_trajectory(*problem.nlp, result.report.x_star);
  result.metrics = evaluate_success(traj, problem.targets, criteria, result.report.final_violation);
  result.max_product = max_complementarity_product(*problem.nlp, result.report.x_star);
  return result;
}

std::vector<RunResult> run_all(const std::vector<RunSpec>& runs, int jobs, const SuccessCriteria& criteria) {
  std::vector<RunResult> out(runs.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const int n = static_cast<int>(runs.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = run_one(runs[i], criteria);
    } catch (const std::exception& e) {
      out[i].spec = runs[i];
      out[i].error = e.what();
      out[i].report.final_violation = kInf;
      out[i].metrics.violation = kInf;
    }
  }
  return out;
}

std::vector<std::vector<double>> cartpole_initial_states() {
  // x, theta (0 = upright), xdot, thetadot. Three starts centred between the
  // walls and two offset towards the right wall.
  return {{0.0, 0.5, 0.0, 0.0},
          {0.0, -0.6, 0.0, 0.0},
          {0.0, 0.5, 0.0, 0.5},
          {0.1, 0.5, 0.0, 0.0},
          {0.2, 0.5, 0.0, 0.0}};
}

std::vector<TransportScenario> transport_scenarios() {
  // Cart from 3 m to the origin; payload offsets are relative to the cart
  // (-1 leftmost, 0 middle, +1 rightmost with l0 = 1).
  return {{"middle_to_middle", {3.0, 3.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}},
          {"left_to_right", {2.0, 3.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0}},
          {"right_to_left", {4.0, 3.0, 0.0, 0.0}, {-1.0, 0.0, 0.0, 0.0}},
          {"middle_to_left", {3.0, 3.0, 0.0, 0.0}, {-1.0, 0.0, 0.0, 0.0}},
          {"moving_right_to_left", {4.0, 3.0, -4.0, -4.0}, {-1.0, 0.0, -2.0, -2.0}}};
}

std::vector<std::vector<double>> circle_targets(int count, double radius) {
  if (count < 1) throw std::invalid_argument("circle_targets: count must be >= 1");
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) {
    const double phi = -2.0 * std::numbers::pi * i / count;
    out.push_back({radius * std::cos(phi), radius * std::sin(phi), wrap_angle(phi)});
  }
  return out;
}

std::vector<std::string> suite_names() {
  return {"toy", "cartpole", "push_box", "transport", "push_t", "hopper", "waiter", "desk", "all"};
}

std::vector<RunSpec> make_suite(const std::string& name, std::uint64_t master_seed) {
  std::vector<RunSpec> runs;
  auto add = [&](std::string label, std::string problem, ParamMap params, GuessMode mode) {
    RunSpec r;
    r.label = std::move(label);
    r.problem = std::move(problem);
    r.params = std::move(params);
    r.guess.mode = mode;
    runs.push_back(std::move(r));
  };
  auto want = [&](const char* s) { return name == s || name == "all" ||
                                          (name == "desk" && (std::string(s) == "cartpole" ||
                                                              std::string(s) == "push_box" ||
                                                              std::string(s) == "transport")); };

  if (want("toy")) {
    for (const auto& x0 : std::vector<std::vector<double>>{{1.0, 1.0}, {2.0, 0.5}, {-1.0, 3.0}})
      add("toy_mpcc", "toy_mpcc", vec_param("x0", x0), GuessMode::PassiveRollout);
    add("cq_fail", "cq_fail", {}, GuessMode::PassiveRollout);
  }
  if (want("cartpole")) {
    const auto states = cartpole_initial_states();
    for (std::size_t i = 0; i < states.size(); ++i) {
      for (GuessMode mode : {GuessMode::PassiveRollout, GuessMode::NoisyRollout})
        add("cartpole_ic" + std::to_string(i) + (mode == GuessMode::NoisyRollout ? "_noisy" : "_passive"),
            "cartpole", vec_param("initial_state", states[i]), mode);
    }
  }
  if (want("push_box")) {
    const auto targets = circle_targets(8, 3.0);
    for (std::size_t i = 0; i < targets.size(); ++i)
      add("push_box_target" + std::to_string(i), "push_box", vec_param("target_pose", targets[i]),
          GuessMode::AllZero);
  }
  if (want("transport")) {
    for (const auto& s : transport_scenarios())
      add("transport_" + s.name, "transport",
          {{"initial_state", s.initial_state}, {"target_state", s.target_state}}, GuessMode::AllZero);
  }
  if (want("push_t")) {
    const auto targets = circle_targets(4, 0.3);
    for (std::size_t i = 0; i < targets.size(); ++i)
      add("push_t_target" + std::to_string(i), "push_t", vec_param("target_pose", targets[i]),
          GuessMode::AllZero);
  }
  if (want("hopper")) add("hopper", "hopper", {}, GuessMode::PassiveRollout);
  if (want("waiter")) add("waiter", "waiter", {}, GuessMode::AllZero);

  if (runs.empty()) {
    std::string known;
    for (const auto& s : suite_names()) known += (known.empty() ? "" : ", ") + s;
    throw std::invalid_argument("unknown suite '" + name + "' (known: " + known + ")");
  }
  for (std::size_t i = 0; i < runs.size(); ++i) runs[i].guess.seed = splitmix64(master_seed + i);
  return runs;
}

std::vector<SuiteRow> summarize(const std::vector<RunResult>& results) {
  std::vector<SuiteRow> rows;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<const RunResult*>> groups;
  for (const auto& r : results) {
    auto [it, inserted] = index.emplace(r.spec.problem, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&r);
  }
  for (const auto& [problem, gi] : index) {
    (void)problem;
    const auto& group = groups[gi];
    SuiteRow row;
    row.problem = group.front()->spec.problem;
    row.runs = static_cast<int>(group.size());
    std::vector<double> tracking;
    std::vector<double> violation;
    double iters = 0.0;
    double wall = 0.0;
    for (const RunResult* r : group) {
      if (r->error.empty() && r->metrics.success) ++row.successes;
      if (r->error.empty()) {
        tracking.push_back(r->metrics.tracking_error);
        violation.push_back(r->metrics.violation);
      }
      iters += r->report.iterations;
      wall += r->report.wall_time;
    }
    row.success_rate = 100.0 * row.successes / row.runs;
    row.median_tracking_error = median(tracking);
    row.median_violation = median(violation);
    row.mean_iterations = iters / row.runs;
    row.mean_wall_time = wall / row.runs;
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [&](const SuiteRow& a, const SuiteRow& b) {
    return index.at(a.problem) < index.at(b.problem);
  });
  return rows;
}

}  // namespace crisp

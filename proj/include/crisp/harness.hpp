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

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "crisp/problems.hpp"
#include "crisp/registry.hpp"
#include "crisp/solver.hpp"

namespace crisp {

struct SuccessCriteria {
  double max_violation = 1e-5;
  double translation = 0.1;
  double velocity = 0.5;
  double angle = std::numbers::pi / 6.0;
  double angular_rate = 0.1 * std::numbers::pi;

  void validate() const;
};

/// Terminal errors per tracked group kind. Kinds the problem does not track
/// are left empty and do not gate success.
struct SuccessMetrics {
  double violation = 0.0;
  std::optional<double> translation_error;
  std::optional<double> velocity_error;
  std::optional<double> angle_error;  // wrapped to [0, pi]
  std::optional<double> angular_rate_error;
  double tracking_error = 0.0;  // Euclidean norm over every tracked component
  bool success = false;
};

SuccessMetrics evaluate_success(const Trajectory& trajectory, const std::vector<TrackedGroup>& targets,
                                const SuccessCriteria& criteria, double violation);

/// Largest |a * b| over the complementarity pairs of `problem` at x.
double max_complementarity_product(const NlpProblem& problem, const Vector& x);

struct RunSpec {
  std::string label;
  std::string problem;
  ParamMap params;  // overrides applied on top of the problem defaults
  GuessOptions guess;
  SolverConfig config;
};

struct RunResult {
  RunSpec spec;
  SolveReport report;
  SuccessMetrics metrics;
  double max_product = 0.0;
  std::string error;  // non-empty when the run threw
};

/// Builds, guesses and solves one run. Exceptions from the solve are caught
/// and recorded in `error`; problem construction errors propagate.
RunResult run_one(const RunSpec& spec, const SuccessCriteria& criteria = {},
                  const SolveOptions& options = {});

/// Independent runs executed concurrently (jobs <= 0 selects every core).
/// Results are returned in input order.
std::vector<RunResult> run_all(const std::vector<RunSpec>& runs, int jobs,
                               const SuccessCriteria& criteria = {});

/// Documented scenario grids shared by the suites and the acceptance tests.
std::vector<std::vector<double>> cartpole_initial_states();
struct TransportScenario {
  std::string name;
  std::vector<double> initial_state;  // x1, x2, x1dot, x2dot
  std::vector<double> target_state;
};
std::vector<TransportScenario> transport_scenarios();
/// Poses (x, y, theta) evenly spaced clockwise on a circle starting on the
/// +x axis, theta equal to the polar angle wrapped to [-pi, pi).
std::vector<std::vector<double>> circle_targets(int count, double radius);

std::vector<std::string> suite_names();
/// Throws std::invalid_argument for unknown suites. Noisy-guess seeds derive
/// from `master_seed` and the run index.
std::vector<RunSpec> make_suite(const std::string& name, std::uint64_t master_seed = 1);

struct SuiteRow {
  std::string problem;
  int runs = 0;
  int successes = 0;
  double success_rate = 0.0;  // percent
  double median_tracking_error = 0.0;
  double median_violation = 0.0;
  double mean_iterations = 0.0;
  double mean_wall_time = 0.0;
};

std::vector<SuiteRow> summarize(const std::vector<RunResult>& results);

/// Sets one SolverConfig field by name (k_max, delta0, ..., qp_backend,
/// complementarity_mode, exec, ...). Throws std::invalid_argument on unknown
/// keys or values that do not parse as the field's type.
void set_solver_option(SolverConfig& config, const std::string& key, const std::string& value);

/// Static checks of a built problem: derivatives at seeded random points
/// around the passive rollout, objective Hessian PSD, and rollout residuals
/// on the dynamics and initial-condition rows.
struct ProblemCheck {
  std::vector<DerivReport> derivatives;
  double worst_derivative_error = 0.0;
  double min_hessian_pivot = 0.0;
  double rollout_residual = 0.0;
  std::string worst_rollout_row;
  bool derivatives_pass = true;
  bool hessian_pass = true;
  bool rollout_pass = true;

  bool pass() const { return derivatives_pass && hessian_pass && rollout_pass; }
};

ProblemCheck check_problem(const TrajectoryProblem& problem, int points = 20, std::uint64_t seed = 7,
                           double threshold = 1e-4);

// Output writers. Floats use 17 significant digits.

std::string format_double(double v);
void write_trajectory_csv(const std::string& path, const Trajectory& trajectory);
Trajectory read_trajectory_csv(const std::string& path);
inline constexpr int kTraceSchemaVersion = 1;
void write_trace_jsonl(const std::string& path, const SolveReport& report);
/// Deterministic content only; wall times go to write_timing.
void write_summary_json(const std::string& path, const RunResult& result);
void write_timing(const std::string& path, const std::vector<RunResult>& results);
void write_suite_csv(const std::string& path, const std::vector<SuiteRow>& rows);
void write_runs_jsonl(const std::string& path, const std::vector<RunResult>& results);
std::string format_suite_table(const std::vector<SuiteRow>& rows);

}  // namespace crisp

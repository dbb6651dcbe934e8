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
#include <functional>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "crisp/nlp.hpp"
#include "crisp/qp_solver.hpp"

namespace crisp {

struct SolverConfig {
  int k_max = 1000;
  double delta0 = 1.0;
  double delta_max = 10.0;
  double mu0 = 10.0;
  double mu_max = 1e6;
  double eta_low = 0.25;
  double eta_high = 0.75;
  double gamma_shrink = 0.25;
  double gamma_expand = 2.0;
  double eps_c = 1e-6;
  double eps_p = 1e-3;
  double eps_r = 1e-3;
  double qp_tol = 1e-8;
  /// A step counts as reaching the trust-region boundary when
  /// |‖p‖∞ − Δ| <= boundary_tol·Δ.
  double boundary_tol = 1e-3;
  std::string qp_backend = "reference";
  /// Consumed by problem builders; the solver itself does not read it.
  ProductMode complementarity_mode = ProductMode::Equality;
  bool trust_reset_on_penalty_bump = true;
  bool second_order_correction = true;
  bool warm_start = true;
  Exec exec = Exec::Parallel;

  bool certify = true;
  int certificate_directions = 64;
  double certificate_fd_step = 1e-5;
  std::uint64_t certificate_seed = 20240601;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

enum class SolveStatus { Success, PenaltyMaxOut, MaxIterations, QpFailure, Cancelled };

std::string_view to_string(SolveStatus s);

struct IterationRecord {
  int iteration = 0;
  double merit = 0.0;       // at x_k under the penalties used for this step
  double objective = 0.0;   // J(x_k)
  double max_violation = 0.0;
  double delta = 0.0;       // radius used for this step
  double rho = 0.0;
  double ared = 0.0;
  double pred = 0.0;
  double step_norm_inf = 0.0;
  bool soc_used = false;
  bool accepted = false;
  bool converged_sentinel = false;
  bool penalty_bumped = false;
  double mu_max_entry = 0.0;
  int qp_iterations = 0;
  QpStatus qp_status = QpStatus::Optimal;
};

struct StationarityCertificate {
  int n_directions = 0;
  double min_directional_derivative = 0.0;
  double fd_step = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  Vector x_star;
  int iterations = 0;
  std::vector<IterationRecord> trace;
  double final_merit = 0.0;
  double final_objective = 0.0;
  double final_violation = 0.0;
  PenaltyVector final_mu;
  int penalty_updates = 0;
  std::optional<StationarityCertificate> certificate;
  double wall_time = 0.0;  // seconds
  std::string message;

  bool success() const { return status == SolveStatus::Success; }
};

using ProgressCallback = std::function<void(const IterationRecord&)>;

struct SolveOptions {
  ProgressCallback progress;
  std::stop_token stop;
};

/// Runs the trust-region loop from x0. Throws NonFiniteEvaluation (with the
/// iteration number in the message) and std::invalid_argument on bad input.
SolveReport solve(const NlpProblem& problem, const Vector& x0, const SolverConfig& config,
                  const SolveOptions& options = {});

/// ared / pred, or the converged sentinel when pred < 1e-14.
struct Ratio {
  double value = 0.0;
  bool converged = false;
};
inline constexpr double kPredFloor = 1e-14;
Ratio reduction_ratio(double ared, double pred);

double update_trust_region(double rho, double step_inf_norm, double delta, const SolverConfig& config);

struct PenaltyUpdate {
  PenaltyVector mu;
  bool max_out = false;
  int bumped = 0;
};

/// Scales every row with violation >= eps_c by 10, capped at mu_max. Flags
/// max_out when such a row was already at mu_max.
PenaltyUpdate update_penalties(const PenaltyVector& mu, const ViolationReport& violations,
                               const SolverConfig& config);

/// One-sided finite-difference estimate of the smallest directional
/// derivative of the merit function over random unit directions and the
/// signed coordinate axes.
StationarityCertificate stationarity_certificate(const NlpProblem& problem, const Vector& x_star,
                                                 const PenaltyVector& mu, int n_dirs = 64,
                                                 double fd_step = 1e-5,
                                                 std::uint64_t seed = 20240601);

}  // namespace crisp

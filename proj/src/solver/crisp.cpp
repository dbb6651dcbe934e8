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

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "crisp/qp.hpp"
#include "crisp/solver.hpp"

namespace crisp {

void SolverConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("SolverConfig: ") + what);
  };
  need(k_max > 0, "k_max must be positive");
  need(0.0 < eta_low && eta_low < eta_high && eta_high < 1.0, "need 0 < eta_low < eta_high < 1");
  need(0.0 < gamma_shrink && gamma_shrink < 1.0, "need 0 < gamma_shrink < 1");
  need(gamma_expand > 1.0, "need gamma_expand > 1");
  need(delta0 > 0.0 && delta0 <= delta_max, "need 0 < delta0 <= delta_max");
  need(mu0 > 0.0 && mu0 <= mu_max, "need 0 < mu0 <= mu_max");
  need(eps_c > 0.0 && eps_p > 0.0 && eps_r > 0.0 && qp_tol > 0.0, "tolerances must be positive");
  need(boundary_tol >= 0.0 && boundary_tol < 1.0, "need 0 <= boundary_tol < 1");
  need(certificate_directions >= 1, "certificate_directions must be >= 1");
  need(certificate_fd_step > 0.0, "certificate_fd_step must be positive");
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Success: return "Success";
    case SolveStatus::PenaltyMaxOut: return "PenaltyMaxOut";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::QpFailure: return "QpFailure";
    case SolveStatus::Cancelled: return "Cancelled";
  }
  return "MaxIterations";
}

Ratio reduction_ratio(double ared, double pred) {
  if (pred < kPredFloor) return {0.0, true};
  return {ared / pred, false};
}

double update_trust_region(double rho, double step_inf_norm, double delta, const SolverConfig& config) {
  if (rho < config.eta_low) return config.gamma_shrink * delta;
  if (rho > config.eta_high && std::abs(step_inf_norm - delta) <= config.boundary_tol * delta)
    return std::min(config.gamma_expand * delta, config.delta_max);
  return delta;
}

PenaltyUpdate update_penalties(const PenaltyVector& mu, const ViolationReport& violations,
                               const SolverConfig& config) {
  const Eigen::Index me = mu.eq.size();
  if (violations.per_row.size() != me + mu.ineq.size())
    throw std::invalid_argument("update_penalties: violation report does not match penalties");
  PenaltyUpdate out{mu, false, 0};
  auto bump = [&](double& m) {
    if (m >= mu.mu_max) out.max_out = true;
    m = std::min(10.0 * m, mu.mu_max);
    ++out.bumped;
  };
  for (Eigen::Index i = 0; i < me; ++i)
    if (violations.per_row[i] >= config.eps_c) bump(out.mu.eq[i]);
  for (Eigen::Index i = 0; i < mu.ineq.size(); ++i)
    if (violations.per_row[me + i] >= config.eps_c) bump(out.mu.ineq[i]);
  return out;
}

StationarityCertificate stationarity_certificate(const NlpProblem& problem, const Vector& x_star,
                                                 const PenaltyVector& mu, int n_dirs, double fd_step,
                                                 std::uint64_t seed) {
  if (n_dirs < 1 || !(fd_step > 0.0))
    throw std::invalid_argument("stationarity_certificate: need n_dirs >= 1 and fd_step > 0");
  const int n = problem.n_vars();
  const double base = eval_merit(problem, x_star, mu);
  double min_dd = kInf;
  auto probe = [&](const Vector& dir) {
    const double v = eval_merit(problem, x_star + fd_step * dir, mu);
    min_dd = std::min(min_dd, (v - base) / fd_step);
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector d(n);
  for (int k = 0; k < n_dirs; ++k) {
    for (int j = 0; j < n; ++j) d[j] = normal(rng);
    const double norm = d.norm();
    if (norm == 0.0) continue;
    probe(d / norm);
  }
  Vector e = Vector::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    probe(e);
    e[j] = -1.0;
    probe(e);
    e[j] = 0.0;
  }
  return {n_dirs + 2 * n, min_dd, fd_step};
}

namespace {

class Loop {
 public:
  Loop(const NlpProblem& problem, const SolverConfig& config, const SolveOptions& options)
      : problem_(problem), cfg_(config), opt_(options), backend_(make_qp_backend(config.qp_backend)) {
    qp_settings_.tol = config.qp_tol;
  }

  SolveReport run(const Vector& x0) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    x_ = x0;
    mu_ = PenaltyVector::uniform(problem_.n_eq(), problem_.n_ineq(), cfg_.mu0, cfg_.mu_max);
    double delta = cfg_.delta0;
    relinearize();

    rep.status = SolveStatus::MaxIterations;
    int k = 0;
    for (; k < cfg_.k_max; ++k) {
      if (opt_.stop.stop_requested()) {
        rep.status = SolveStatus::Cancelled;
        break;
      }
      IterationRecord rec;
      rec.iteration = k;
      rec.merit = merit_;
      rec.objective = lin_.objective;
      rec.max_violation = violation_.max();
      rec.delta = delta;
      rec.mu_max_entry = mu_.max_entry();

      const QpData qp = build_subproblem(lin_, mu_, delta);
      std::optional<QpSolution> sol = solve_subproblem(qp, delta, rec);
      if (!sol) {
        rep.status = SolveStatus::QpFailure;
        rep.message = "QP subproblem failed at iteration " + std::to_string(k);
        push(rep, rec);
        break;
      }
      Vector p = extract_step(qp, sol->z);
      double pred = predicted_reduction(qp, p);
      Trial trial = evaluate_trial(p, k);
      double ared = merit_ - trial.merit;
      Ratio ratio = reduction_ratio(ared, pred);

      bool accepted = false;
      bool abandon = false;
      if (ratio.converged) {
        rec.converged_sentinel = true;
        p.setZero();
      } else {
        if (ared < 0.0 && cfg_.second_order_correction) {
          const QpData soc = apply_second_order_correction(qp, problem_, x_, p);
          const QpSolution* warm = cfg_.warm_start ? &*sol : nullptr;
          QpSolution sol2 = backend_->solve(soc, qp_settings_, warm);
          rec.qp_iterations += sol2.iterations;
          if (usable(soc, sol2)) {
            rec.soc_used = true;
            p = extract_step(soc, sol2.z);
            trial = evaluate_trial(p, k);
            ared = merit_ - trial.merit;
            ratio = reduction_ratio(ared, pred);
            sol = std::move(sol2);
          }
        }
        if (ared < 0.0) abandon = true;
      }
      rec.pred = pred;
      rec.ared = ared;
      rec.rho = ratio.value;
      rec.step_norm_inf = p.size() ? p.cwiseAbs().maxCoeff() : 0.0;

      if (abandon) {
        delta = cfg_.gamma_shrink * delta;
        push(rep, rec);
        continue;
      }

      if (!ratio.converged) {
        delta = update_trust_region(ratio.value, rec.step_norm_inf, delta, cfg_);
        x_ = x_ + p;
        accepted = true;
        lin_ = problem_.linearize(x_, cfg_.exec);
        merit_ = trial.merit;
        violation_ = violation_from_values(lin_.c);
        if (cfg_.warm_start) warm_ = sol;
      }
      rec.accepted = accepted;

      if (delta < cfg_.eps_r || rec.step_norm_inf < cfg_.eps_p) {
        if (violation_.max() < cfg_.eps_c) {
          push(rep, rec);
          rep.status = SolveStatus::Success;
          ++k;
          break;
        }
        PenaltyUpdate upd = update_penalties(mu_, violation_, cfg_);
        rec.penalty_bumped = true;
        push(rep, rec);
        if (upd.max_out) {
          rep.status = SolveStatus::PenaltyMaxOut;
          rep.message = "penalty parameter reached mu_max on a violated constraint";
          ++k;
          break;
        }
        mu_ = std::move(upd.mu);
        ++rep.penalty_updates;
        merit_ = merit_from_values(lin_.objective, lin_.c, mu_);
        if (cfg_.trust_reset_on_penalty_bump) delta = cfg_.delta0;
        warm_.reset();
        continue;
      }
      push(rep, rec);
    }

    rep.iterations = k;
    rep.x_star = x_;
    rep.final_objective = lin_.objective;
    rep.final_merit = merit_;
    rep.final_violation = violation_.max();
    rep.final_mu = mu_;
    if (rep.status == SolveStatus::Success && cfg_.certify)
      rep.certificate = stationarity_certificate(problem_, x_, mu_, cfg_.certificate_directions,
                                                 cfg_.certificate_fd_step, cfg_.certificate_seed);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

 private:
  struct Trial {
    double merit = 0.0;
  };

  void relinearize() {
    lin_ = problem_.linearize(x_, cfg_.exec);
    merit_ = merit_from_values(lin_.objective, lin_.c, mu_);
    violation_ = violation_from_values(lin_.c);
  }

  Trial evaluate_trial(const Vector& p, int k) const {
    try {
      const Vector xt = x_ + p;
      return {merit_from_values(problem_.objective().value(xt), problem_.constraints(xt, cfg_.exec), mu_)};
    } catch (const NonFiniteEvaluation& e) {
      throw NonFiniteEvaluation(e.label(), "trial point at iteration " + std::to_string(k));
    }
  }

  bool usable(const QpData& qp, const QpSolution& sol) const {
    if (sol.status == QpStatus::Optimal) return true;
    // Accept a nearly converged solve rather than stopping the outer loop.
    // The residuals belong to the returned iterate, so this is checked the
    // same way whether the backend ran out of iterations or factorizations.
    return sol.z.allFinite() &&
           sol.kkt.max() <= 1e3 * cfg_.qp_tol * kkt_scale(qp);
  }

  std::optional<QpSolution> solve_subproblem(const QpData& qp, double delta, IterationRecord& rec) {
    const QpSolution* warm = (cfg_.warm_start && warm_) ? &*warm_ : nullptr;
    QpSolution sol = backend_->solve(qp, qp_settings_, warm);
    rec.qp_iterations = sol.iterations;
    rec.qp_status = sol.status;
    if (usable(qp, sol)) return sol;
    // Regularize the step block and retry once from a cold start.
    const QpData reg = build_subproblem(lin_, mu_, delta, 1e-9);
    sol = backend_->solve(reg, qp_settings_, nullptr);
    rec.qp_iterations += sol.iterations;
    rec.qp_status = sol.status;
    if (usable(reg, sol)) return sol;
    return std::nullopt;
  }

  void push(SolveReport& rep, const IterationRecord& rec) {
    rep.trace.push_back(rec);
    if (opt_.progress) opt_.progress(rec);
  }

  const NlpProblem& problem_;
  const SolverConfig& cfg_;
  const SolveOptions& opt_;
  std::unique_ptr<QpBackend> backend_;
  QpSettings qp_settings_;

  Vector x_;
  PenaltyVector mu_;
  Linearization lin_;
  double merit_ = 0.0;
  ViolationReport violation_;
  std::optional<QpSolution> warm_;
};

}  // namespace

SolveReport solve(const NlpProblem& problem, const Vector& x0, const SolverConfig& config,
                  const SolveOptions& options) {
  config.validate();
  if (x0.size() != problem.n_vars()) throw std::invalid_argument("solve: x0 has wrong length");
  if (!x0.allFinite()) throw std::invalid_argument("solve: x0 is not finite");
  Loop loop(problem, config, options);
  return loop.run(x0);
}

}  // namespace crisp
